#include "ctxlens/basis.hpp"

#include "ctxlens/error.hpp"
#include "ctxlens/kernels.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ctxlens;

namespace {

LabeledMatrix matrix_from(std::vector<std::vector<double>> rows) {
    LabeledMatrix m;
    m.rows = rows.size();
    m.cols = rows[0].size();
    for (std::size_t r = 0; r < m.rows; ++r) {
        m.labels.push_back("r" + std::to_string(r));
        m.data.insert(m.data.end(), rows[r].begin(), rows[r].end());
    }
    return m;
}

} // namespace

TEST_CASE("two-point PCA lies on the connecting line") {
    const auto m = matrix_from({{1.0, 0.0}, {0.0, 1.0}});
    const auto basis = fit_basis(m);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    // sign convention: first largest-magnitude entry flipped positive
    CHECK(basis.components[0] == doctest::Approx(inv_sqrt2).epsilon(1e-12));
    CHECK(basis.components[1] == doctest::Approx(-inv_sqrt2).epsilon(1e-12));
    CHECK(basis.variances[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(basis.variances[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(basis.effective_rank() == 1);
}

TEST_CASE("basis conditions hold on toy200") {
    const auto& basis = testfx::toy200().basis;
    const std::size_t d = basis.dim;
    for (std::size_t i = 0; i < d; ++i) {
        const auto xi = basis.component(i);
        CHECK(std::fabs(std::sqrt(kernels::dot(xi.data(), xi.data(), d)) - 1.0) <= 1e-9);
        if (i + 1 < d) CHECK(basis.variances[i] >= basis.variances[i + 1]);
        CHECK(basis.variances[i] >= 0.0);
    }
    // orthogonality on a spread of pairs (full O(d^2) pass lives in acceptance)
    for (std::size_t i = 0; i < d; i += 7)
        for (std::size_t j = i + 1; j < d; j += 11)
            CHECK(std::fabs(kernels::dot(basis.component(i).data(),
                                         basis.component(j).data(), d)) <= 1e-9);
}

TEST_CASE("eigenvalues match the Eigen oracle on toy200") {
    const auto& fx = testfx::toy200();
    const auto oracle_values = oracle::covariance_eigenvalues(fx.pvectors);
    double total_got = 0.0;
    double total_want = 0.0;
    for (std::size_t i = 0; i < fx.basis.dim; ++i) {
        CHECK(std::fabs(fx.basis.variances[i] - oracle_values[i]) <= 1e-8);
        total_got += fx.basis.variances[i];
        total_want += oracle_values[i];
    }
    CHECK(fx.basis.variances[0] / total_got ==
          doctest::Approx(oracle_values[0] / total_want).epsilon(1e-8));
}

TEST_CASE("full-dimension projection is an isometry") {
    const auto& fx = testfx::toy200();
    Basis full = fx.basis;
    full.m = full.dim;
    const auto q = project_all(fx.pvectors, full);
    std::mt19937 rng(11);
    std::uniform_int_distribution<std::size_t> pick(0, fx.pvectors.rows - 1);
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t a = pick(rng);
        const std::size_t b = pick(rng);
        const double orig = std::sqrt(kernels::sqdist(fx.pvectors.row(a).data(),
                                                      fx.pvectors.row(b).data(),
                                                      fx.pvectors.cols));
        const double proj =
            std::sqrt(kernels::sqdist(q.row(a).data(), q.row(b).data(), q.cols));
        CHECK(std::fabs(orig - proj) <= 1e-6);
    }
}

TEST_CASE("cumulative variance is a normalized non-decreasing curve") {
    const auto& basis = testfx::toy200().basis;
    double prev = 0.0;
    for (std::size_t k = 1; k <= basis.dim; k += 9) {
        const double c = cumulative_variance(basis, k);
        CHECK(c >= prev);
        CHECK(c <= 1.0 + 1e-12);
        prev = c;
    }
    CHECK(cumulative_variance(basis, basis.dim) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(cumulative_variance(basis, 0), Error);
    CHECK_THROWS_AS(cumulative_variance(basis, basis.dim + 1), Error);

    // two-point example: all variance on the first axis
    const auto tiny = fit_basis(matrix_from({{1.0, 0.0}, {0.0, 1.0}}));
    CHECK(cumulative_variance(tiny, 1) == doctest::Approx(1.0).epsilon(1e-12));

    // frozen regression: half the toy200 variance needs 64 axes
    std::size_t crossing = 0;
    for (std::size_t k = 1; k <= basis.dim; ++k)
        if (cumulative_variance(basis, k) >= 0.5) {
            crossing = k;
            break;
        }
    CHECK(crossing == 64);
}

TEST_CASE("noise proportion: edge contracts") {
    const auto& fx = testfx::toy200();
    // F = V gives exactly 1 at every m
    std::vector<std::size_t> all_rows(fx.pvectors.rows);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    const auto curve = noise_curve(fx.basis, fx.pvectors, all_rows);
    for (const std::size_t m : {std::size_t{1}, std::size_t{64}, fx.basis.dim})
        CHECK(curve.proportion[m - 1] == doctest::Approx(1.0).epsilon(1e-12));
    // empty F forbidden
    CHECK_THROWS_AS(noise_curve(fx.basis, fx.pvectors, {}), Error);
    CHECK_THROWS_AS(noise_proportion(fx.basis, fx.pvectors, {}, 1), Error);
}

TEST_CASE("incremental noise curve matches from-scratch recomputation") {
    // exhaustive over every m on a small fixture
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<std::vector<double>> rows(30, std::vector<double>(12));
    for (auto& r : rows)
        for (auto& x : r) x = dist(rng);
    const auto m = matrix_from(rows);
    const auto basis = fit_basis(m);
    const std::vector<std::size_t> f_rows = {2, 7, 19};
    const auto curve = noise_curve(basis, m, f_rows);
    for (std::size_t k = 1; k <= basis.dim; ++k)
        CHECK(std::fabs(curve.proportion[k - 1] - noise_proportion(basis, m, f_rows, k)) <=
              1e-10);

    // spot checks at toy scale
    const auto& fx = testfx::toy200();
    const auto toy_curve = noise_curve(fx.basis, fx.pvectors, fx.function_rows);
    for (const std::size_t k : {std::size_t{1}, std::size_t{4}, std::size_t{37},
                                std::size_t{199}})
        CHECK(std::fabs(toy_curve.proportion[k - 1] -
                        noise_proportion(fx.basis, fx.pvectors, fx.function_rows, k)) <=
              1e-10);
}

TEST_CASE("select_m: monotone-increasing curve picks the left edge") {
    // function rows carry nothing on the dominant axis and everything on
    // the second, so the proportion rises from m=1
    const auto m = matrix_from({{10.0, 0.0, 0.0},
                                {-10.0, 0.0, 0.1},
                                {0.0, 3.0, 0.0},
                                {0.0, -3.0, 0.1},
                                {0.0, 0.1, 0.05}});
    auto basis = fit_basis(m);
    const auto curve = noise_curve(basis, m, {2, 3});
    bool monotone_up = true;
    for (std::size_t k = 2; k <= basis.effective_rank(); ++k)
        if (curve.proportion[k - 1] < curve.proportion[k - 2]) monotone_up = false;
    REQUIRE(monotone_up);
    CHECK(select_m(basis, m, {2, 3}) == 1);
    CHECK(basis.m == 1);
}

TEST_CASE("select_m on toy200: frozen regression") {
    const auto& fx = testfx::toy200();
    CHECK(fx.basis.m == 4);
    const auto curve = noise_curve(fx.basis, fx.pvectors, fx.function_rows);
    CHECK(curve.proportion[3] == doctest::Approx(0.011036528334).epsilon(1e-6));
    // the selection is a strict interior minimum against both edges
    CHECK(curve.proportion[3] < curve.proportion[0]);
    CHECK(curve.proportion[3] < curve.proportion[fx.basis.effective_rank() - 1]);
}

TEST_CASE("projection: mean row maps to the origin") {
    const auto& fx = testfx::toy200();
    std::vector<double> mean(fx.pvectors.cols, 0.0);
    for (std::size_t r = 0; r < fx.pvectors.rows; ++r) {
        const auto row = fx.pvectors.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) mean[j] += row[j];
    }
    kernels::scale(mean.data(), 1.0 / fx.pvectors.rows, mean.size());
    const auto q = project(mean, fx.basis);
    for (const double x : q) CHECK(std::fabs(x) <= 1e-10);
}

TEST_CASE("projection matches the explicit dot-product oracle for red") {
    const auto& fx = testfx::toy200();
    const auto index = fx.pvectors.label_index();
    const std::size_t red = index.at("red");
    const auto got = project(fx.pvectors.row(red), fx.basis);
    const auto want = oracle::project_explicit(fx.pvectors, red, fx.basis, fx.basis.m);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::fabs(got[i] - want[i]) <= 1e-10);
}

TEST_CASE("project_all is deterministic across thread counts") {
    const auto& fx = testfx::toy200();
    const auto q1 = project_all(fx.pvectors, fx.basis, 1);
    const auto q4 = project_all(fx.pvectors, fx.basis, 4);
    CHECK(q1.serialize() == q4.serialize());
    CHECK(q1.cols == fx.basis.m);
}

TEST_CASE("basis serialization round-trips bit-exactly") {
    const auto& basis = testfx::toy200().basis;
    const auto bytes = basis.serialize();
    const auto back = Basis::deserialize(bytes);
    CHECK(back.serialize() == bytes);
    CHECK(back.m == basis.m);
    CHECK(back.sd_v == basis.sd_v);
}

TEST_CASE("fit and projection argument validation") {
    CHECK_THROWS_AS(fit_basis(matrix_from({{1.0, 2.0}})), Error);
    const auto& fx = testfx::toy200();
    Basis unset = fx.basis;
    unset.m = 0;
    CHECK_THROWS_AS(project(fx.pvectors.row(0), unset), Error);
    std::vector<double> wrong(3, 0.0);
    CHECK_THROWS_AS(project(wrong, fx.basis), Error);
}
