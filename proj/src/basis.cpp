#include "ctxlens/basis.hpp"

#include "ctxlens/error.hpp"
#include "ctxlens/io.hpp"
#include "ctxlens/kernels.hpp"
#include "ctxlens/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctxlens {

namespace {

// Cyclic Jacobi for symmetric matrices. a (d x d) is destroyed; on return
// eigvecs row k holds the eigenvector of eigvals[k]. Unsorted.
void jacobi_eigen(std::vector<double>& a, std::size_t d,
                  std::vector<double>& eigvecs, std::vector<double>& eigvals) {
    eigvecs.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) eigvecs[i * d + i] = 1.0;

    constexpr int kMaxSweeps = 100;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off += std::fabs(a[p * d + q]);
        if (off == 0.0) {
            converged = true;
            break;
        }

        // small rotations are skipped in early sweeps
        const double tresh = sweep < 3 ? 0.2 * off / (d * d) : 0.0;

        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a[p * d + q];
                const double g = 100.0 * std::fabs(apq);
                if (sweep > 3 && std::fabs(a[p * d + p]) + g == std::fabs(a[p * d + p]) &&
                    std::fabs(a[q * d + q]) + g == std::fabs(a[q * d + q])) {
                    a[p * d + q] = 0.0;
                    a[q * d + p] = 0.0;
                    continue;
                }
                if (std::fabs(apq) <= tresh) continue;

                const double theta = 0.5 * (a[q * d + q] - a[p * d + p]) / apq;
                double t;
                if (std::fabs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double h = t * apq;

                a[p * d + p] -= h;
                a[q * d + q] += h;
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a[k * d + p];
                    const double akq = a[k * d + q];
                    const double np = akp - s * (akq + akp * tau);
                    const double nq = akq + s * (akp - akq * tau);
                    a[k * d + p] = np;
                    a[p * d + k] = np;
                    a[k * d + q] = nq;
                    a[q * d + k] = nq;
                }
                kernels::rot(eigvecs.data() + p * d, eigvecs.data() + q * d, c, s, d);
            }
        }
    }
    if (!converged) raise(ErrorCode::state, "jacobi eigensolver did not converge");
    eigvals.resize(d);
    for (std::size_t i = 0; i < d; ++i) eigvals[i] = a[i * d + i];
}

void fix_sign(std::span<double> v) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double mag = std::fabs(v[i]);
        if (mag > best) {
            best = mag;
            arg = i;
        }
    }
    if (v[arg] < 0.0)
        for (double& x : v) x = -x;
}

double population_sd(std::span<const double> values) {
    const double n = static_cast<double>(values.size());
    const double mean = kernels::sum(values.data(), values.size()) / n;
    double acc = 0.0;
    for (const double v : values) {
        const double d = v - mean;
        acc += d * d;
    }
    return std::sqrt(acc / n);
}

} // namespace

std::size_t Basis::effective_rank() const {
    std::size_t rank = 0;
    while (rank < dim && sd_v[rank] > 0.0) ++rank;
    return rank;
}

Basis fit_basis(const LabeledMatrix& pvectors, std::size_t threads) {
    const std::size_t n = pvectors.rows;
    const std::size_t d = pvectors.cols;
    if (n < 2) raise(ErrorCode::args, "fit_basis needs at least 2 rows");
    if (d == 0) raise(ErrorCode::args, "fit_basis needs at least 1 column");

    std::vector<double> mean(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = pvectors.row(r);
        for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
    }
    kernels::scale(mean.data(), 1.0 / static_cast<double>(n), d);

    // centered data, plus its transpose for contiguous covariance dots
    std::vector<double> centered(n * d);
    std::vector<double> centered_t(d * n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = pvectors.row(r);
        for (std::size_t j = 0; j < d; ++j) {
            const double v = row[j] - mean[j];
            centered[r * d + j] = v;
            centered_t[j * n + r] = v;
        }
    }

    std::vector<double> cov(d * d);
    const double denom = static_cast<double>(n - 1);
    parallel_for(d, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = i; j < d; ++j) {
                const double c =
                    kernels::dot(centered_t.data() + i * n, centered_t.data() + j * n, n) /
                    denom;
                cov[i * d + j] = c;
                cov[j * d + i] = c;
            }
        }
    });

    std::vector<double> eigvecs;
    std::vector<double> eigvals;
    jacobi_eigen(cov, d, eigvecs, eigvals);

    // stable descending sort; tiny negative eigenvalues are rounding noise
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return eigvals[x] > eigvals[y]; });

    Basis basis;
    basis.dim = d;
    basis.fitted_rows = n;
    basis.components.resize(d * d);
    basis.variances.resize(d);
    basis.origins.resize(d);
    basis.sd_v.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t src = order[i];
        basis.variances[i] = std::max(eigvals[src], 0.0);
        std::copy_n(eigvecs.data() + src * d, d, basis.components.data() + i * d);
        fix_sign({basis.components.data() + i * d, d});
        basis.origins[i] = kernels::dot(mean.data(), basis.components.data() + i * d, d);
    }

    parallel_for(d, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> proj(n);
        for (std::size_t i = begin; i < end; ++i) {
            const double* x = basis.components.data() + i * d;
            for (std::size_t r = 0; r < n; ++r)
                proj[r] = kernels::dot(centered.data() + r * d, x, d);
            basis.sd_v[i] = population_sd(proj);
        }
    });
    // flush denormal-scale noise on degenerate dimensions to exact zero
    const double sd_floor = basis.sd_v.empty()
                                ? 0.0
                                : *std::max_element(basis.sd_v.begin(), basis.sd_v.end()) *
                                      1e-12;
    for (double& sd : basis.sd_v)
        if (sd <= sd_floor) sd = 0.0;

    return basis;
}

double cumulative_variance(const Basis& basis, std::size_t k) {
    if (k < 1 || k > basis.dim)
        raise(ErrorCode::range, "k out of range [1, " + std::to_string(basis.dim) + "]");
    const double total =
        kernels::sum(basis.variances.data(), basis.variances.size());
    if (total <= 0.0) raise(ErrorCode::state, "basis has zero total variance");
    return kernels::sum(basis.variances.data(), k) / total;
}

NoiseCurve noise_curve(const Basis& basis, const LabeledMatrix& pvectors,
                       const std::vector<std::size_t>& function_rows,
                       std::size_t threads) {
    if (function_rows.empty()) raise(ErrorCode::args, "empty function-word set");
    const std::size_t n = pvectors.rows;
    const std::size_t d = basis.dim;
    if (pvectors.cols != d) raise(ErrorCode::args, "matrix/basis dimension mismatch");
    for (const std::size_t r : function_rows)
        if (r >= n) raise(ErrorCode::range, "function-word row out of range");

    // per-component projection columns, contiguous per component
    std::vector<double> columns(d * n);
    parallel_for(d, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double* x = basis.components.data() + i * d;
            double* col = columns.data() + i * n;
            for (std::size_t r = 0; r < n; ++r)
                col[r] = kernels::dot(pvectors.row(r).data(), x, d) - basis.origins[i];
        }
    });

    NoiseCurve curve;
    curve.proportion.resize(d);
    curve.function_mass.resize(d);
    curve.total_mass.resize(d);
    std::vector<double> nrm2(n, 0.0);
    std::vector<char> is_function(n, 0);
    for (const std::size_t r : function_rows) is_function[r] = 1;

    for (std::size_t m = 1; m <= d; ++m) {
        kernels::add_sq(nrm2.data(), columns.data() + (m - 1) * n, n);
        double fsum = 0.0;
        double tsum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double norm = std::sqrt(nrm2[r]);
            tsum += norm;
            if (is_function[r]) fsum += norm;
        }
        curve.function_mass[m - 1] = fsum;
        curve.total_mass[m - 1] = tsum;
        curve.proportion[m - 1] = tsum > 0.0 ? fsum / tsum : 0.0;
    }
    return curve;
}

double noise_proportion(const Basis& basis, const LabeledMatrix& pvectors,
                        const std::vector<std::size_t>& function_rows,
                        std::size_t m) {
    if (function_rows.empty()) raise(ErrorCode::args, "empty function-word set");
    if (m < 1 || m > basis.dim) raise(ErrorCode::range, "m out of range");
    std::vector<char> is_function(pvectors.rows, 0);
    for (const std::size_t r : function_rows) {
        if (r >= pvectors.rows) raise(ErrorCode::range, "function-word row out of range");
        is_function[r] = 1;
    }
    double fsum = 0.0;
    double tsum = 0.0;
    for (std::size_t r = 0; r < pvectors.rows; ++r) {
        double nrm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double q = kernels::dot(pvectors.row(r).data(),
                                          basis.components.data() + i * basis.dim,
                                          basis.dim) -
                             basis.origins[i];
            nrm2 += q * q;
        }
        const double norm = std::sqrt(nrm2);
        tsum += norm;
        if (is_function[r]) fsum += norm;
    }
    return tsum > 0.0 ? fsum / tsum : 0.0;
}

std::size_t select_m(Basis& basis, const LabeledMatrix& pvectors,
                     const std::vector<std::size_t>& function_rows,
                     std::size_t threads) {
    const std::size_t rank = basis.effective_rank();
    if (rank == 0) raise(ErrorCode::state, "basis has no non-degenerate components");
    const NoiseCurve curve = noise_curve(basis, pvectors, function_rows, threads);
    std::size_t best = 1;
    for (std::size_t m = 2; m <= rank; ++m)
        if (curve.proportion[m - 1] < curve.proportion[best - 1]) best = m;
    basis.m = best;
    return best;
}

std::vector<double> project(std::span<const double> pvec, const Basis& basis) {
    if (basis.m == 0) raise(ErrorCode::state, "basis dimensionality m is unset");
    if (pvec.size() != basis.dim)
        raise(ErrorCode::args, "vector/basis dimension mismatch");
    std::vector<double> q(basis.m);
    for (std::size_t i = 0; i < basis.m; ++i)
        q[i] = kernels::dot(pvec.data(), basis.components.data() + i * basis.dim,
                            basis.dim) -
               basis.origins[i];
    return q;
}

LabeledMatrix project_all(const LabeledMatrix& pvectors, const Basis& basis,
                          std::size_t threads) {
    if (basis.m == 0) raise(ErrorCode::state, "basis dimensionality m is unset");
    if (pvectors.cols != basis.dim)
        raise(ErrorCode::args, "matrix/basis dimension mismatch");
    LabeledMatrix q;
    q.rows = pvectors.rows;
    q.cols = basis.m;
    q.labels = pvectors.labels;
    q.data.resize(q.rows * q.cols);
    parallel_for(q.rows, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const auto qr = project(pvectors.row(r), basis);
            std::copy(qr.begin(), qr.end(), q.row(r).begin());
        }
    });
    return q;
}

std::string Basis::serialize() const {
    io::ByteWriter w;
    w.raw(io::header(io::ArtifactType::basis).data(), 16);
    w.u64(dim);
    w.u64(m);
    w.u64(fitted_rows);
    w.f64_block(components);
    w.f64_block(variances);
    w.f64_block(origins);
    w.f64_block(sd_v);
    return w.take();
}

Basis Basis::deserialize(std::span<const char> bytes) {
    io::ByteReader r(bytes);
    if (io::read_header(r) != io::ArtifactType::basis)
        raise(ErrorCode::format, "artifact is not a basis file");
    Basis b;
    b.dim = r.u64();
    b.m = r.u64();
    b.fitted_rows = r.u64();
    b.components.resize(b.dim * b.dim);
    b.variances.resize(b.dim);
    b.origins.resize(b.dim);
    b.sd_v.resize(b.dim);
    r.f64_block(b.components.data(), b.components.size());
    r.f64_block(b.variances.data(), b.variances.size());
    r.f64_block(b.origins.data(), b.origins.size());
    r.f64_block(b.sd_v.data(), b.sd_v.size());
    if (!r.at_end()) raise(ErrorCode::format, "trailing bytes in basis file");
    return b;
}

void Basis::save(const std::filesystem::path& path) const {
    io::write_file_atomic(path, serialize());
}

Basis Basis::load(const std::filesystem::path& path) {
    const std::string bytes = io::read_file(path);
    return deserialize(bytes);
}

} // namespace ctxlens
