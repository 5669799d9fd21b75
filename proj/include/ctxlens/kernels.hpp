#pragma once

#include <cstddef>

namespace ctxlens::kernels {

/// Double-precision inner-loop primitives. Every routine has a scalar
/// reference implementation and, on x86-64 with AVX2+FMA, a vectorized
/// variant. The active table is picked once at startup from CPUID;
/// CONTEXTLENS_KERNELS=scalar forces the reference path.
struct Ops {
    const char* name;

    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    // y <- alpha*x + beta*y
    void (*axpby)(double alpha, const double* x, double beta, double* y,
                  std::size_t n);
    void (*scale)(double* a, double s, std::size_t n);
    // sum_i (a_i - b_i)^2
    double (*sqdist)(const double* a, const double* b, std::size_t n);
    // sum_i (w_i * (a_i - b_i))^2
    double (*weighted_sqdist)(const double* a, const double* b,
                              const double* w, std::size_t n);
    // plane rotation: (x, y) <- (c*x - s*y, s*x + c*y)
    void (*rot)(double* x, double* y, double c, double s, std::size_t n);
    // acc_i += x_i^2
    void (*add_sq)(double* acc, const double* x, std::size_t n);
};

const Ops& scalar_ops();

/// AVX2+FMA table, or nullptr when the build or the CPU lacks support.
const Ops* avx2_ops();

/// Table selected for this process (stable for the process lifetime).
const Ops& active();

inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline void axpby(double alpha, const double* x, double beta, double* y,
                  std::size_t n) {
    active().axpby(alpha, x, beta, y, n);
}
inline void scale(double* a, double s, std::size_t n) { active().scale(a, s, n); }
inline double sqdist(const double* a, const double* b, std::size_t n) {
    return active().sqdist(a, b, n);
}
inline double weighted_sqdist(const double* a, const double* b, const double* w,
                              std::size_t n) {
    return active().weighted_sqdist(a, b, w, n);
}
inline void rot(double* x, double* y, double c, double s, std::size_t n) {
    active().rot(x, y, c, s, n);
}
inline void add_sq(double* acc, const double* x, std::size_t n) {
    active().add_sq(acc, x, n);
}

} // namespace ctxlens::kernels
