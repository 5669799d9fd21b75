#include "ctxlens/scaling.hpp"

#include "ctxlens/error.hpp"
#include "ctxlens/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctxlens {

QuerySpace::QuerySpace(const Basis& basis, const LabeledMatrix& qvectors)
    : basis_(&basis), qvectors_(&qvectors) {
    if (basis.m == 0) raise(ErrorCode::state, "basis dimensionality m is unset");
    if (qvectors.cols != basis.m)
        raise(ErrorCode::args, "Q-matrix width does not match basis.m");
    index_ = qvectors.label_index();
    for (const auto& label : qvectors.labels) {
        const auto underscore = label.rfind('_');
        if (underscore != std::string::npos)
            ++sense_count_[label.substr(0, underscore)];
    }
}

std::size_t QuerySpace::resolve(const std::string& word) const {
    if (const auto it = index_.find(word); it != index_.end()) return it->second;
    // single-sense headword fallback: `car` -> `car_1`
    if (const auto sc = sense_count_.find(word);
        sc != sense_count_.end() && sc->second == 1) {
        for (int sense = 1; sense <= 9; ++sense) {
            const auto it = index_.find(word + "_" + std::to_string(sense));
            if (it != index_.end()) return it->second;
        }
    }
    raise(ErrorCode::unknown_word, "unknown word '" + word + "'");
}

std::vector<std::size_t> QuerySpace::resolve_bag(const ContextBag& bag) const {
    if (bag.empty()) raise(ErrorCode::args, "empty context");
    std::vector<std::size_t> rows;
    rows.reserve(bag.size());
    for (const auto& w : bag) rows.push_back(resolve(w));
    return rows;
}

ScalingProfile QuerySpace::profile_rows(const std::vector<std::size_t>& rows) const {
    if (rows.empty()) raise(ErrorCode::args, "empty context");
    const std::size_t m = dims();
    const double n = static_cast<double>(rows.size());

    ScalingProfile p;
    p.factors.resize(m);
    p.context_sd.resize(m);
    p.ratios.resize(m);

    std::vector<double> mean(m, 0.0);
    for (const std::size_t r : rows) {
        const auto q = qvec(r);
        for (std::size_t i = 0; i < m; ++i) mean[i] += q[i];
    }
    kernels::scale(mean.data(), 1.0 / n, m);

    std::vector<double> var(m, 0.0);
    for (const std::size_t r : rows) {
        const auto q = qvec(r);
        for (std::size_t i = 0; i < m; ++i) {
            const double d = q[i] - mean[i];
            var[i] += d * d;
        }
    }

    for (std::size_t i = 0; i < m; ++i) {
        p.context_sd[i] = std::sqrt(var[i] / n);    // population SD over the bag
        const double sd_v = basis_->sd_v[i];
        if (sd_v <= 0.0) {
            p.ratios[i] = std::numeric_limits<double>::infinity();
            p.factors[i] = 0.0;
            continue;
        }
        const double r = p.context_sd[i] / sd_v;
        p.ratios[i] = r;
        p.factors[i] = r <= 1.0 ? 1.0 - r : 0.0;
    }
    return p;
}

ScalingProfile QuerySpace::profile(const ContextBag& context) const {
    return profile_rows(resolve_bag(context));
}

ScalingProfile QuerySpace::unit_profile() const {
    const std::size_t m = dims();
    ScalingProfile p;
    p.factors.assign(m, 1.0);
    p.context_sd.assign(m, 0.0);
    p.ratios.assign(m, 0.0);
    return p;
}

double QuerySpace::distance_rows(std::size_t r1, std::size_t r2,
                                 const ScalingProfile& profile) const {
    return std::sqrt(kernels::weighted_sqdist(qvec(r1).data(), qvec(r2).data(),
                                              profile.factors.data(), dims()));
}

double QuerySpace::distance(const std::string& w1, const std::string& w2,
                            const ScalingProfile& profile) const {
    return distance_rows(resolve(w1), resolve(w2), profile);
}

double QuerySpace::context_distance_rows(std::size_t row,
                                         const std::vector<std::size_t>& context_rows,
                                         const ScalingProfile& profile) const {
    double total = 0.0;
    for (const std::size_t r : context_rows) total += distance_rows(row, r, profile);
    return total / static_cast<double>(context_rows.size());
}

double QuerySpace::context_distance(const std::string& w,
                                    const ContextBag& context) const {
    const auto rows = resolve_bag(context);
    return context_distance_rows(resolve(w), rows, profile_rows(rows));
}

std::vector<Neighbor> QuerySpace::nearest(const ContextBag& context, std::size_t k,
                                          const std::vector<std::string>& candidates,
                                          const ScalingProfile* profile) const {
    const auto context_rows = resolve_bag(context);
    const ScalingProfile local =
        profile ? ScalingProfile{} : profile_rows(context_rows);
    const ScalingProfile& prof = profile ? *profile : local;

    std::vector<Neighbor> scored;
    if (candidates.empty()) {
        scored.reserve(labels().size());
        for (std::size_t r = 0; r < labels().size(); ++r)
            scored.push_back({labels()[r],
                              context_distance_rows(r, context_rows, prof)});
    } else {
        scored.reserve(candidates.size());
        for (const auto& w : candidates)
            scored.push_back({w, context_distance_rows(resolve(w), context_rows, prof)});
    }
    if (k < 1 || k > scored.size())
        raise(ErrorCode::range, "k out of range [1, " + std::to_string(scored.size()) + "]");

    std::sort(scored.begin(), scored.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.word < b.word;
    });
    scored.resize(k);
    return scored;
}

} // namespace ctxlens
