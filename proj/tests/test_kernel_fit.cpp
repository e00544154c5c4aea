#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "activerank/kernel_fit.hpp"
#include "activerank/rng.hpp"

using namespace activerank;

namespace {

std::vector<LabeledRow> linear_rows(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LabeledRow> rows(n);
    for (auto& r : rows) {
        r.feature = rng.uniform();
        r.label = rng.bernoulli(r.feature) ? 1.0 : 0.0;
    }
    return rows;
}

}  // namespace

TEST_CASE("constant labels clip to the band") {
    std::vector<LabeledRow> rows;
    for (int i = 0; i < 100; ++i) rows.push_back({static_cast<double>(i), 1.0});
    const auto fit = fit_kernel_posterior(rows, 20, {0.05, 0.1});
    for (const auto& c : fit.model.cells()) CHECK(c.eta == kFitClipHigh);
    CHECK(fit.model.kind() == ModelKind::tabulated);
    CHECK(fit.feature_min == 0.0);
    CHECK(fit.feature_max == 99.0);
}

TEST_CASE("linear posterior is recovered") {
    const auto fit = fit_kernel_posterior(linear_rows(10000, 1), 100, {0.01, 0.02, 0.05, 0.1, 0.2, 0.3});
    REQUIRE(fit.model.cells().size() == 100);
    REQUIRE(fit.cv_errors.size() == 6);
    // Features span [~0, ~1] so the scaled grid is close to the raw one.
    for (const auto& c : fit.model.cells()) {
        const double x = c.box.center()[0];
        if (x >= 0.1 && x <= 0.9) CHECK(std::abs(c.eta - x) <= 0.08);
    }
    // The chosen bandwidth minimizes the held-out error.
    std::size_t best = 0;
    for (std::size_t k = 1; k < fit.cv_errors.size(); ++k) {
        if (fit.cv_errors[k] < fit.cv_errors[best]) best = k;
    }
    const std::vector<double> hs{0.01, 0.02, 0.05, 0.1, 0.2, 0.3};
    CHECK(fit.bandwidth == hs[best]);
}

TEST_CASE("single candidate bandwidth") {
    const auto fit = fit_kernel_posterior(linear_rows(500, 2), 10, {0.1});
    CHECK(fit.bandwidth == 0.1);
    CHECK(fit.cv_errors.size() == 1);
    CHECK(fit.model.cells().size() == 10);
}

TEST_CASE("nadaraya-watson fallback and weighting") {
    const std::vector<LabeledRow> rows{{0.0, 0.0}, {1.0, 1.0}};
    CHECK(nadaraya_watson(rows, 0.5, 0.01, 0.42) == 0.42);
    CHECK(nadaraya_watson(rows, 0.5, 1.0, 0.0) == doctest::Approx(0.5));
    CHECK(nadaraya_watson(rows, 0.9, 1.0, 0.0) > 0.5);
}

TEST_CASE("fit input errors") {
    CHECK_THROWS_AS(fit_kernel_posterior({}, 10, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(fit_kernel_posterior(linear_rows(10, 1), 10, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(fit_kernel_posterior(linear_rows(100, 1), 0, {0.1}), std::invalid_argument);
    CHECK_THROWS_AS(fit_kernel_posterior(linear_rows(100, 1), 10, {}), std::invalid_argument);
    CHECK_THROWS_AS(fit_kernel_posterior(linear_rows(100, 1), 10, {0.0}), std::invalid_argument);
    std::vector<LabeledRow> same(100, LabeledRow{0.3, 1.0});
    CHECK_THROWS_AS(fit_kernel_posterior(same, 10, {0.1}), std::invalid_argument);
}
