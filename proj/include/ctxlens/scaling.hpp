#pragma once

#include "ctxlens/basis.hpp"
#include "ctxlens/matrix.hpp"

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ctxlens {

/// A context is a bag of word-ids: duplicates count.
using ContextBag = std::vector<std::string>;

/// Per-dimension rescaling derived from how tightly a context clusters
/// on each dimension relative to the whole vocabulary:
///   ratio_i  = SD_i(C) / SD_i(V)
///   factor_i = 1 - ratio_i   clamped to 0 when ratio_i > 1
/// Dimensions with SD_i(V) = 0 get factor 0 under every context.
struct ScalingProfile {
    std::vector<double> factors;
    std::vector<double> context_sd;
    std::vector<double> ratios;
};

struct Neighbor {
    std::string word;
    double distance = 0.0;
};

/// Read-only query surface over a basis and its Q-matrix. Thread-safe:
/// all queries are const and profiles can be shared across threads.
class QuerySpace {
public:
    QuerySpace(const Basis& basis, const LabeledMatrix& qvectors);

    /// Resolves a word-id to a Q-matrix row. An exact label match wins;
    /// otherwise a headword with exactly one sense resolves to it.
    std::size_t resolve(const std::string& word) const;

    std::span<const double> qvec(std::size_t row) const { return qvectors_->row(row); }
    const std::vector<std::string>& labels() const { return qvectors_->labels; }
    std::size_t dims() const { return qvectors_->cols; }
    const Basis& basis() const { return *basis_; }

    std::vector<std::size_t> resolve_bag(const ContextBag& bag) const;

    ScalingProfile profile(const ContextBag& context) const;
    ScalingProfile profile_rows(const std::vector<std::size_t>& rows) const;
    /// All-ones factors: scaled distance degenerates to plain Euclidean.
    ScalingProfile unit_profile() const;

    double distance(const std::string& w1, const std::string& w2,
                    const ScalingProfile& profile) const;
    double distance_rows(std::size_t r1, std::size_t r2,
                         const ScalingProfile& profile) const;

    /// mean over the context bag of the scaled distance to w.
    double context_distance(const std::string& w, const ContextBag& context) const;
    double context_distance_rows(std::size_t row,
                                 const std::vector<std::size_t>& context_rows,
                                 const ScalingProfile& profile) const;

    /// k closest candidates by context distance, ascending, ties broken
    /// lexicographically by word-id. Candidates default to every row.
    std::vector<Neighbor> nearest(const ContextBag& context, std::size_t k,
                                  const std::vector<std::string>& candidates = {},
                                  const ScalingProfile* profile = nullptr) const;

private:
    const Basis* basis_;
    const LabeledMatrix* qvectors_;
    std::unordered_map<std::string, std::size_t> index_;
    std::unordered_map<std::string, std::size_t> sense_count_;
};

} // namespace ctxlens
