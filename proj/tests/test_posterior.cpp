#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "activerank/kl_confidence.hpp"
#include "activerank/posterior.hpp"
#include "oracles.hpp"

using namespace activerank;

namespace {

const PosteriorModel& two_cell() {
    static const PosteriorModel m = PosteriorModel::uniform_steps({0.8, 0.2});
    return m;
}

// Random 1-d step function with uneven widths.
oracle::Steps random_steps(Rng& rng, std::size_t cells) {
    oracle::Steps s;
    double total = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
        s.widths.push_back(0.05 + rng.uniform());
        total += s.widths.back();
        // Coarse values make exact ties between cells common.
        s.values.push_back(std::round((0.02 + 0.96 * rng.uniform()) * 50.0) / 50.0);
    }
    for (auto& w : s.widths) w /= total;
    return s;
}

PosteriorModel to_model(const oracle::Steps& s) {
    std::vector<ModelCell> cells;
    double lo = 0.0;
    for (std::size_t k = 0; k < s.widths.size(); ++k) {
        const double hi = k + 1 == s.widths.size() ? 1.0 : lo + s.widths[k];
        cells.push_back(ModelCell{Box{{lo}, {hi}}, s.values[k], 0.0});
        lo = hi;
    }
    return PosteriorModel::piecewise(std::move(cells), 1, 1.0);
}

}  // namespace

TEST_CASE("model validation") {
    CHECK_THROWS_AS(PosteriorModel::piecewise({ModelCell{Box{{0.0}, {0.6}}, 0.5, 0.0}}, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PosteriorModel::uniform_steps({0.5, 1.2}), std::invalid_argument);
    CHECK_THROWS_AS(PosteriorModel::constant(0.5, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PosteriorModel::piecewise({ModelCell{Box{{0.0}, {0.5}}, 0.5, 0.0},
                                               ModelCell{Box{{0.6}, {1.1}}, 0.5, 0.0}},
                                              1, 1.0),
                    std::invalid_argument);
    const auto m = PosteriorModel::constant(0.3, 2);
    CHECK(m.dimension() == 2);
    CHECK(m.eta(std::vector<double>{0.2, 1.0}) == 0.3);
    CHECK_THROWS_AS((void)m.eta(std::vector<double>{0.2, 1.1}), std::domain_error);
    CHECK(model_kind_from_string(to_string(ModelKind::analytic)) == ModelKind::analytic);
    CHECK_THROWS_AS(model_kind_from_string("spline"), std::invalid_argument);
}

TEST_CASE("binary label sampling") {
    Rng rng(1);
    const auto one = PosteriorModel::constant(1.0);
    const auto zero = PosteriorModel::constant(0.0);
    const std::vector<double> x{0.4};
    for (int i = 0; i < 1000; ++i) {
        CHECK(sample_label(one, x, rng));
        CHECK_FALSE(sample_label(zero, x, rng));
    }
    const auto m = PosteriorModel::constant(0.3);
    int hits = 0;
    for (int i = 0; i < 100000; ++i) hits += sample_label(m, x, rng) ? 1 : 0;
    CHECK(std::abs(hits / 100000.0 - 0.3) <= 0.005);
    CHECK_THROWS_AS(sample_label(m, std::vector<double>{1.5}, rng), std::domain_error);
}

TEST_CASE("continuous label sampling") {
    const auto m = PosteriorModel::gaussian_label(std::vector<double>{0.0, 1.0}, 1.0, 0.0);
    CHECK(m.eta(std::vector<double>{0.25}) == doctest::Approx(0.5));
    CHECK(m.eta(std::vector<double>{0.75}) == doctest::Approx(0.841344746068543).epsilon(1e-12));
    Rng rng(3);
    const std::vector<double> x{0.75};
    int above = 0;
    for (int i = 0; i < 100000; ++i) above += sample_continuous_label(m, x, rng) >= 0.0 ? 1 : 0;
    CHECK(std::abs(above / 100000.0 - 0.841344746068543) <= 0.005);
    CHECK_THROWS_AS(sample_continuous_label(two_cell(), x, rng), std::invalid_argument);
}

TEST_CASE("positive mass") {
    CHECK(positive_mass(PosteriorModel::constant(0.5)) == 0.5);
    CHECK(positive_mass(two_cell()) == doctest::Approx(0.5));
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const auto s = random_steps(rng, 1 + static_cast<std::size_t>(rng.uniform() * 12));
        const auto m = to_model(s);
        const double p = positive_mass(m);
        CHECK(p == doctest::Approx(s.p()).epsilon(1e-12));
        CHECK(p >= m.min_eta() - 1e-15);
        CHECK(p <= m.max_eta() + 1e-15);
    }
    const auto smooth = PosteriorModel::analytic([](std::span<const double> x) { return x[0] * x[0]; }, 1, 1.0);
    CHECK(positive_mass(smooth) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
    const auto plane =
        PosteriorModel::analytic([](std::span<const double> x) { return 0.5 * (x[0] + x[1]); }, 2, 1.0);
    CHECK(positive_mass(plane) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("gap worked values") {
    const auto flat = PosteriorModel::constant(0.5);
    for (double x : {0.0, 0.3, 1.0}) {
        const auto g = gap(flat, std::vector<double>{x}, 0.1);
        CHECK(g.gap == doctest::Approx(0.025));
        CHECK(g.eta == 0.5);
    }
    const auto top = gap(two_cell(), std::vector<double>{0.25}, 0.1);
    CHECK(top.gap == doctest::Approx(0.02));
    CHECK(top.complexity == doctest::Approx(9728.71487627402).epsilon(1e-10));
    CHECK(bernoulli_kl(0.78, 0.82) == doctest::Approx(0.00513942495343736).epsilon(1e-12));
    const auto bottom = gap(two_cell(), std::vector<double>{0.75}, 0.1);
    CHECK(bottom.gap != doctest::Approx(top.gap));
    CHECK(bottom.gap == doctest::Approx(0.08));
    CHECK_THROWS_AS(gap(PosteriorModel::constant(1.0), std::vector<double>{0.5}, 0.1), std::domain_error);
    CHECK_THROWS_AS(gap(flat, std::vector<double>{0.5}, 0.0), std::invalid_argument);
}

TEST_CASE("gap scan agrees with a brute-force z-grid search") {
    Rng rng(77);
    const double step = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = random_steps(rng, 2 + static_cast<std::size_t>(rng.uniform() * 9));
        const auto m = to_model(s);
        const double x = rng.uniform();
        const double eps = 0.02 + 0.3 * rng.uniform();
        const auto g = gap(m, std::vector<double>{x}, eps);
        CAPTURE(trial);
        CHECK(std::abs(g.gap - oracle::gap_scan(s, g.eta, eps, step)) <= step);
    }
}

TEST_CASE("gap properties: cap, minimality, monotone in epsilon") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = random_steps(rng, 2 + static_cast<std::size_t>(rng.uniform() * 9));
        const auto m = to_model(s);
        const std::vector<double> x{rng.uniform()};
        const double eps = 0.02 + 0.3 * rng.uniform();
        const auto g = gap(m, x, eps);
        CHECK(g.gap <= 1.0 - g.eta + 1e-15);
        CHECK(g.gap > 0.0);
        CHECK(gap(m, x, eps * 1.5).gap >= g.gap - 1e-15);
        if (g.gap < 1.0 - g.eta) {
            const double target = eps * s.p() * (1.0 - g.eta);
            for (double frac : {0.25, 0.5, 0.9, 0.999}) {
                const double z = frac * g.gap;
                double lambda = 0.0;
                for (std::size_t k = 0; k < s.widths.size(); ++k) {
                    if (std::abs(s.values[k] - g.eta) <= z) lambda += s.widths[k];
                }
                CHECK(z * lambda < target);
            }
        }
    }
}

TEST_CASE("total complexity") {
    CHECK(total_complexity(PosteriorModel::constant(0.5), 0.1) == doctest::Approx(7993.32888305932).epsilon(1e-10));
    CHECK(40.0 / bernoulli_kl(0.475, 0.525) == doctest::Approx(7993.32888305932).epsilon(1e-12));
    // Two-cell model: cell-weighted sum against a 10^4-point midpoint quadrature of H.
    const double eps = 0.1;
    double quad = 0.0;
    for (int i = 0; i < 10000; ++i) {
        quad += gap(two_cell(), std::vector<double>{(i + 0.5) / 10000.0}, eps).complexity / 10000.0;
    }
    CHECK(total_complexity(two_cell(), eps) == doctest::Approx(quad).epsilon(1e-6));
    // Non-increasing in epsilon.
    Rng rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = to_model(random_steps(rng, 6));
        double prev = total_complexity(m, 0.01);
        for (double e : {0.02, 0.05, 0.1, 0.2, 0.5}) {
            const double v = total_complexity(m, e);
            CHECK(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }
    // Cells with eta = 1 are skipped.
    const auto with_one = PosteriorModel::uniform_steps({1.0, 0.5});
    CHECK(std::isfinite(total_complexity(with_one, 0.1)));
}

TEST_CASE("continuous-label complexity") {
    const auto g = gap_dkw(PosteriorModel::constant(0.5), std::vector<double>{0.5}, 0.1);
    CHECK(g.complexity == doctest::Approx(std::pow(0.025, -3.0)));
    CHECK(total_complexity_dkw(PosteriorModel::constant(0.5), 0.1) == doctest::Approx(std::pow(0.025, -3.0)));
}

TEST_CASE("analytic models tabulate for gap-type oracles") {
    const auto lin = PosteriorModel::analytic([](std::span<const double> x) { return x[0]; }, 1, 1.0);
    CHECK(lin.eta(std::vector<double>{0.3}) == doctest::Approx(0.3));
    const auto table = lin.tabulate(analytic_tabulation_resolution(1));
    CHECK(table.kind() == ModelKind::tabulated);
    CHECK(table.cells().size() == (1u << 14));
    // eta(y) = y, p = 1/2: lambda(z) = 2z away from the edges, so 2 z^2 = eps p (1 - eta(x)).
    const double eps = 0.1;
    const double expected = std::sqrt(eps * 0.5 * 0.5 / 2.0);
    CHECK(gap(lin, std::vector<double>{0.5}, eps).gap == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("random-walk generator") {
    const auto a = generate_random_walk_posterior(200, 0.0, 0.05, 42);
    const auto b = generate_random_walk_posterior(200, 0.0, 0.05, 42);
    const auto c = generate_random_walk_posterior(200, 0.0, 0.05, 43);
    REQUIRE(a.cells().size() == 200);
    bool differs = false;
    for (std::size_t k = 0; k < 200; ++k) {
        CHECK(a.cells()[k].eta == b.cells()[k].eta);
        CHECK(a.cells()[k].eta >= kWalkLow);
        CHECK(a.cells()[k].eta <= kWalkHigh);
        differs = differs || a.cells()[k].eta != c.cells()[k].eta;
    }
    CHECK(differs);
    CHECK(a.cells()[0].eta == 0.5);

    // Scenario 1 stays put most of the time; scenario 2 moves at every step.
    const auto s1 = generate_random_walk_posterior(2000, 0.9, 0.05, 7);
    const auto s2 = generate_random_walk_posterior(2000, 0.0, 0.05, 7);
    int still1 = 0;
    int still2 = 0;
    for (std::size_t k = 1; k < 2000; ++k) {
        still1 += s1.cells()[k].eta == s1.cells()[k - 1].eta ? 1 : 0;
        still2 += s2.cells()[k].eta == s2.cells()[k - 1].eta ? 1 : 0;
    }
    CHECK(still1 / 1999.0 == doctest::Approx(0.9).epsilon(0.05));
    CHECK(still2 == 0);
    CHECK_THROWS_AS(generate_random_walk_posterior(1, 0.5, 0.05, 1), std::invalid_argument);
}
