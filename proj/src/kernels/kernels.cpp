#include "ctxlens/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace ctxlens::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

void axpby_scalar(double alpha, const double* x, double beta, double* y,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = alpha * x[i] + beta * y[i];
}

void scale_scalar(double* a, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a[i] *= s;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double weighted_sqdist_scalar(const double* a, const double* b, const double* w,
                              std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = w[i] * (a[i] - b[i]);
        acc += d * d;
    }
    return acc;
}

void rot_scalar(double* x, double* y, double c, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void add_sq_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] * x[i];
}

constexpr Ops kScalarOps = {
    "scalar",        dot_scalar,   sum_scalar, axpby_scalar,
    scale_scalar,    sqdist_scalar, weighted_sqdist_scalar,
    rot_scalar,      add_sq_scalar,
};

const Ops* pick_active() {
    if (const char* env = std::getenv("CONTEXTLENS_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return &kScalarOps;
        if (std::strcmp(env, "avx2") == 0 && avx2_ops()) return avx2_ops();
    }
    if (const Ops* simd = avx2_ops()) return simd;
    return &kScalarOps;
}

} // namespace

const Ops& scalar_ops() { return kScalarOps; }

const Ops& active() {
    static const Ops* chosen = pick_active();
    return *chosen;
}

#ifndef CTXLENS_HAVE_AVX2_TU
const Ops* avx2_ops() { return nullptr; }
#endif

} // namespace ctxlens::kernels
