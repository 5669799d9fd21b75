#pragma once

#include "ctxlens/dictionary.hpp"
#include "ctxlens/matrix.hpp"
#include "ctxlens/network.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ctxlens {

/// Spreading-activation parameters. The defaults reproduce the snapshot
/// regime used throughout the pipeline: ten propagation steps with half
/// of each node's activity retained per step, and a quarter of the seed
/// mass re-injected before the final normalization (which leaves the
/// seed word dominant at roughly a quarter of the total activity).
struct ActivationConfig {
    std::size_t steps = 10;
    double retention = 0.5;      // in [0,1)
    double source_clamp = 0.25;  // in (0,1]

    void validate() const;
};

/// Activity distribution over all network nodes: non-negative, unit sum.
struct PVector {
    std::vector<double> values;
    std::string source;    // seed description, e.g. "red" or "motor_2"
};

/// A seed is a sparse distribution over node indices. Weights need not
/// be normalized; spread() normalizes them to unit mass.
struct SeedEntry {
    std::uint32_t node = 0;
    double weight = 1.0;
};
using Seed = std::vector<SeedEntry>;

PVector spread(const SemanticNetwork& net, const Seed& seed,
               const ActivationConfig& cfg);

/// Per-step activity snapshots: rows 0..steps hold a^0..a^steps, and the
/// final row holds the normalized post-clamp result (same as spread()).
std::vector<std::vector<double>> spread_trace(const SemanticNetwork& net,
                                              const Seed& seed,
                                              const ActivationConfig& cfg);

/// Seed resolution for a word: a defining-vocabulary word activates its
/// own node; `head_N` activates that sense's definition tokens with
/// count-proportional weights; a plain non-vocabulary headword activates
/// its concatenated definitions.
Seed seed_for_word(const SemanticNetwork& net, const Dictionary& dict,
                   const std::string& word);

PVector p_vector(const SemanticNetwork& net, const Dictionary& dict,
                 const std::string& word, const ActivationConfig& cfg);

/// P-matrix over the whole queryable vocabulary: one row per
/// defining-vocabulary word (vocabulary order), then one row per entry
/// (file order, labeled `head_N`). Rows are independent, so parallel
/// builds are byte-identical to sequential ones.
LabeledMatrix build_all_pvectors(const SemanticNetwork& net, const Dictionary& dict,
                                 const ActivationConfig& cfg, std::size_t threads = 1);

} // namespace ctxlens
