#pragma once

// Independent oracles for cross-checking the library. Everything here is
// coded with plain loops (or Eigen) on purpose: none of it shares the
// kernel or solver paths it is used to verify.

#include "ctxlens/basis.hpp"
#include "ctxlens/matrix.hpp"
#include "ctxlens/network.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

/// Dense matrix-power spreading activation.
inline std::vector<double> spread_dense(const ctxlens::SemanticNetwork& net,
                                        const std::vector<std::pair<std::uint32_t, double>>& seed,
                                        std::size_t steps, double retention,
                                        double clamp) {
    const std::size_t n = net.node_count();
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto links = net.links_of(i);
        const auto weights = net.weights_of(i);
        for (std::size_t k = 0; k < links.size(); ++k) w[i][links[k]] += weights[k];
    }

    std::vector<double> s(n, 0.0);
    double mass = 0.0;
    for (const auto& [node, weight] : seed) {
        s[node] += weight;
        mass += weight;
    }
    for (double& v : s) v /= mass;

    std::vector<double> a = s;
    for (std::size_t t = 0; t < steps; ++t) {
        std::vector<double> next(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double flow = 0.0;
            for (std::size_t i = 0; i < n; ++i) flow += a[i] * w[i][j];
            next[j] = retention * a[j] + (1.0 - retention) * flow;
        }
        a = std::move(next);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        a[j] += clamp * s[j];
        total += a[j];
    }
    for (double& v : a) v /= total;
    return a;
}

/// Eigen-based covariance eigendecomposition; returns eigenvalues in
/// descending order (sample covariance about the mean, 1/(n-1)).
inline std::vector<double> covariance_eigenvalues(const ctxlens::LabeledMatrix& m) {
    const Eigen::Index n = static_cast<Eigen::Index>(m.rows);
    const Eigen::Index d = static_cast<Eigen::Index>(m.cols);
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < d; ++c) x(r, c) = m.data[r * m.cols + c];
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    std::vector<double> values(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + d);
    std::sort(values.begin(), values.end(), std::greater<>());
    return values;
}

/// Plain-loop projection of one row: <p, X_i> - origin_i for i < m.
inline std::vector<double> project_explicit(const ctxlens::LabeledMatrix& pvectors,
                                            std::size_t row, const ctxlens::Basis& basis,
                                            std::size_t m) {
    std::vector<double> q(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < basis.dim; ++j)
            acc += pvectors.data[row * pvectors.cols + j] * basis.components[i * basis.dim + j];
        q[i] = acc - basis.origins[i];
    }
    return q;
}

/// Scaling factors recomputed from scratch (population SD over the bag).
inline std::vector<double> factors_explicit(const ctxlens::LabeledMatrix& q,
                                            const ctxlens::Basis& basis,
                                            const std::vector<std::size_t>& context_rows) {
    const std::size_t m = q.cols;
    std::vector<double> factors(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double mean = 0.0;
        for (const std::size_t r : context_rows) mean += q.data[r * m + i];
        mean /= static_cast<double>(context_rows.size());
        double var = 0.0;
        for (const std::size_t r : context_rows) {
            const double d = q.data[r * m + i] - mean;
            var += d * d;
        }
        const double sd_c = std::sqrt(var / static_cast<double>(context_rows.size()));
        if (basis.sd_v[i] <= 0.0) {
            factors[i] = 0.0;
            continue;
        }
        const double ratio = sd_c / basis.sd_v[i];
        factors[i] = ratio <= 1.0 ? 1.0 - ratio : 0.0;
    }
    return factors;
}

/// Distance measured in the explicitly rescaled space: coordinates are
/// multiplied out first, then plain Euclidean distance is taken.
inline double scaled_distance_explicit(const ctxlens::LabeledMatrix& q, std::size_t r1,
                                       std::size_t r2, const std::vector<double>& factors) {
    std::vector<double> a(q.cols), b(q.cols);
    for (std::size_t i = 0; i < q.cols; ++i) {
        a[i] = factors[i] * q.data[r1 * q.cols + i];
        b[i] = factors[i] * q.data[r2 * q.cols + i];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < q.cols; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

inline double context_distance_explicit(const ctxlens::LabeledMatrix& q, std::size_t row,
                                        const std::vector<std::size_t>& context_rows,
                                        const std::vector<double>& factors) {
    double total = 0.0;
    for (const std::size_t r : context_rows)
        total += scaled_distance_explicit(q, row, r, factors);
    return total / static_cast<double>(context_rows.size());
}

/// Full ranking recomputed from scratch: (word, d-bar) ascending with
/// lexicographic tie-break.
inline std::vector<std::pair<std::string, double>> rank_explicit(
    const ctxlens::LabeledMatrix& q, const ctxlens::Basis& basis,
    const std::vector<std::size_t>& context_rows,
    const std::vector<std::pair<std::string, std::size_t>>& candidates,
    bool unit_scaling = false) {
    std::vector<double> factors = unit_scaling
                                      ? std::vector<double>(q.cols, 1.0)
                                      : factors_explicit(q, basis, context_rows);
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(candidates.size());
    for (const auto& [word, row] : candidates)
        scored.emplace_back(word,
                            context_distance_explicit(q, row, context_rows, factors));
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    return scored;
}

} // namespace oracle
