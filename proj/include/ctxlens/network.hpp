#pragma once

#include "ctxlens/dictionary.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ctxlens {

/// Weighted directed graph over the defining vocabulary, stored as CSR.
/// Each node's outgoing weights sum to 1, so one propagation step is a
/// multiplication by the transpose of a row-stochastic matrix.
struct SemanticNetwork {
    std::vector<std::string> nodes;        // defining-vocabulary order
    std::vector<std::uint64_t> offsets;    // size nodes+1
    std::vector<std::uint32_t> targets;
    std::vector<double> weights;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t link_count() const { return targets.size(); }

    std::span<const std::uint32_t> links_of(std::size_t node) const {
        return {targets.data() + offsets[node],
                static_cast<std::size_t>(offsets[node + 1] - offsets[node])};
    }
    std::span<const double> weights_of(std::size_t node) const {
        return {weights.data() + offsets[node],
                static_cast<std::size_t>(offsets[node + 1] - offsets[node])};
    }

    std::string serialize() const;
    static SemanticNetwork deserialize(std::span<const char> bytes);
    void save(const std::filesystem::path& path) const;
    static SemanticNetwork load(const std::filesystem::path& path);
};

/// One node per defining-vocabulary word. A node whose word has entries
/// links to every token across its concatenated sense definitions with
/// count-proportional weights; a word with no entry gets a self-link.
SemanticNetwork build_network(const Dictionary& dict);

} // namespace ctxlens
