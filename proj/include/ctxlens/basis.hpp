#pragma once

#include "ctxlens/matrix.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ctxlens {

/// Principal-component basis fitted over a P-matrix.
///
/// components holds D unit-norm, mutually orthogonal direction vectors
/// (row i = X_i) ordered by non-increasing variance. origins[i] is the
/// mean projected value on X_i, so projections are origin-shifted;
/// sd_v[i] is the population standard deviation of the origin-shifted
/// projections over all fitted rows. m is the selected dimensionality
/// (0 until select_m or an override sets it).
struct Basis {
    std::size_t dim = 0;            // D
    std::size_t m = 0;              // 0 = unset
    std::size_t fitted_rows = 0;
    std::vector<double> components; // D x D row-major
    std::vector<double> variances;
    std::vector<double> origins;
    std::vector<double> sd_v;

    std::span<const double> component(std::size_t i) const {
        return {components.data() + i * dim, dim};
    }

    /// Number of leading components with sd_v > 0; selection and scaling
    /// never use dimensions past this.
    std::size_t effective_rank() const;

    std::string serialize() const;
    static Basis deserialize(std::span<const char> bytes);
    void save(const std::filesystem::path& path) const;
    static Basis load(const std::filesystem::path& path);
};

/// Covariance PCA about the mean. Deterministic: cyclic Jacobi sweeps in
/// fixed order, eigenpairs stably sorted by descending variance, and each
/// component's sign fixed so its largest-magnitude entry is positive.
Basis fit_basis(const LabeledMatrix& pvectors, std::size_t threads = 1);

/// sum of the first k variances over the total, k in [1, D].
double cumulative_variance(const Basis& basis, std::size_t k);

struct NoiseCurve {
    std::vector<double> proportion;     // index m-1
    std::vector<double> function_mass;  // raw sum over F of |Q_m(w)|
    std::vector<double> total_mass;     // raw sum over all rows
};

/// Noise estimate per candidate dimensionality: the fraction of total
/// Q-norm mass carried by the function-word rows, computed incrementally
/// over m via |Q_m|^2 = |Q_{m-1}|^2 + q_m^2.
NoiseCurve noise_curve(const Basis& basis, const LabeledMatrix& pvectors,
                       const std::vector<std::size_t>& function_rows,
                       std::size_t threads = 1);

/// From-scratch recomputation at a single m (oracle for the incremental
/// curve; O(n*m*D)).
double noise_proportion(const Basis& basis, const LabeledMatrix& pvectors,
                        const std::vector<std::size_t>& function_rows,
                        std::size_t m);

/// argmin of the noise proportion over m = 1..effective_rank, ties toward
/// smaller m. Stores the result in basis.m and returns it.
std::size_t select_m(Basis& basis, const LabeledMatrix& pvectors,
                     const std::vector<std::size_t>& function_rows,
                     std::size_t threads = 1);

/// Q-vector of one P-vector: q_i = <p, X_i> - origins[i] for i < m.
std::vector<double> project(std::span<const double> pvec, const Basis& basis);

/// Projects every row, preserving labels. Requires basis.m set.
LabeledMatrix project_all(const LabeledMatrix& pvectors, const Basis& basis,
                          std::size_t threads = 1);

} // namespace ctxlens
