// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "activerank/experiment.hpp"
#include "activerank/fixed_grid.hpp"
#include "activerank/klcrank.hpp"
#include "activerank/kltcrank.hpp"
#include "activerank/roc.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace activerank;

namespace {

// Exploration constant used for every algorithm run below (see README).
constexpr double kC = 0.1;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

RankParams params(double epsilon, std::uint64_t cap = kDefaultSampleCap) {
    RankParams p;
    p.epsilon = epsilon;
    p.delta = 0.1;
    p.c = kC;
    p.max_samples = cap;
    return p;
}

double pac_threshold(std::size_t runs) { return 0.1 + 2.0 * std::sqrt(0.1 * 0.9 / static_cast<double>(runs)); }

Verdict pac_binary() {
    const auto model = generate_random_walk_posterior(20, 0.9, 0.05, 12345);
    const std::size_t runs = 50;
    std::size_t failures = 0;
    std::size_t capped = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        Rng rng(split_seed(1, r));
        const auto rec = run_to_completion(params(0.1), model, rng, {});
        failures += rec.terminal_regret > 0.1 ? 1 : 0;
        capped += rec.cap_hit ? 1 : 0;
    }
    const double frac = static_cast<double>(failures) / runs;
    return {frac <= pac_threshold(runs) && capped == 0,
            fmt("failure fraction %.3f (limit %.3f), %g capped runs", frac, pac_threshold(runs),
                static_cast<double>(capped))};
}

Verdict stopping_time() {
    const auto model = PosteriorModel::constant(0.5);
    std::string detail;
    bool pass = true;
    double prev = 0.0;
    for (double eps : {0.2, 0.1, 0.05}) {
        std::vector<double> taus;
        for (std::size_t r = 0; r < 20; ++r) {
            Rng rng(split_seed(2, r));
            const auto rec = run_to_completion(params(eps, 50'000'000), model, rng, {});
            pass = pass && !rec.cap_hit;
            taus.push_back(static_cast<double>(rec.tau));
        }
        const double tc = total_complexity(model, eps);
        const double scale = tc * std::log(tc / 0.1);
        const double med = median(taus);
        const double ratio = med / scale;
        pass = pass && med > prev && ratio >= 0.1 && ratio <= 50.0;
        prev = med;
        if (!detail.empty()) detail += "; ";
        detail += fmt("eps=%g median tau %.4g ratio %.3g", eps, med, ratio);
    }
    return {pass, detail};
}

Verdict adaptive_vs_grid() {
    const auto model = generate_random_walk_posterior(100, 0.0, 0.01, 777);
    const std::uint64_t budget = 20'000;
    const std::size_t runs = 50;
    auto med_regret = [&](const std::function<RunRecord(Rng&)>& run) {
        std::vector<double> v;
        for (std::size_t r = 0; r < runs; ++r) {
            Rng rng(split_seed(3, r));
            v.push_back(run(rng).checkpoints.back().regret);
        }
        return median(v);
    };
    const double adaptive =
        med_regret([&](Rng& rng) { return run_to_completion(params(0.1, budget), model, rng, {budget}); });
    bool pass = true;
    std::string detail = fmt("klcrank %.4f", adaptive);
    for (std::size_t k : {100u, 300u, 500u}) {
        const double grid =
            med_regret([&](Rng& rng) { return run_fixed_grid(params(0.1, budget), k, model, rng, {budget}); });
        pass = pass && adaptive <= grid;
        detail += fmt(", K=%g %.4f", static_cast<double>(k), grid);
    }
    return {pass, detail};
}

// Step model with per-cell scores, as a scoring over the cells themselves.
ScoringOutput cell_scoring(const oracle::Steps& s, const std::vector<double>& scores) {
    ScoringOutput out;
    double lo = 0.0;
    for (std::size_t k = 0; k < s.widths.size(); ++k) {
        const double hi = k + 1 == s.widths.size() ? 1.0 : lo + s.widths[k];
        ScoredPoint p;
        p.location = {0.5 * (lo + hi)};
        p.rank = static_cast<std::size_t>(scores[k]);
        p.region = {Box{{lo}, {hi}}};
        out.points.push_back(std::move(p));
        lo = hi;
    }
    return out;
}

PosteriorModel steps_model(const oracle::Steps& s) {
    std::vector<ModelCell> cells;
    double lo = 0.0;
    for (std::size_t k = 0; k < s.widths.size(); ++k) {
        const double hi = k + 1 == s.widths.size() ? 1.0 : lo + s.widths[k];
        cells.push_back({Box{{lo}, {hi}}, s.values[k], 0.0});
        lo = hi;
    }
    return PosteriorModel::piecewise(std::move(cells), 1, 1.0);
}

Verdict roc_oracle() {
    // Cell widths are chosen so every cell's negative mass is a whole number of 1e-4 steps:
    // all ROC breakpoints then sit on the brute-force alpha grid and the comparison is exact.
    const std::size_t grid = 10'000;
    Rng rng(4);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        oracle::Steps s;
        std::vector<std::size_t> units(10, 1);
        for (std::size_t u = 10; u < grid; ++u) ++units[static_cast<std::size_t>(rng.uniform() * 10)];
        double total = 0.0;
        for (std::size_t k = 0; k < 10; ++k) {
            s.values.push_back(0.05 + 0.9 * rng.uniform());
            s.widths.push_back(static_cast<double>(units[k]) / (1.0 - s.values.back()));
            total += s.widths.back();
        }
        for (auto& w : s.widths) w /= total;
        std::vector<double> ranks(10);
        for (std::size_t k = 0; k < 10; ++k) ranks[k] = static_cast<double>(k + 1);
        std::shuffle(ranks.begin(), ranks.end(), rng.engine());
        const double exact = scoring_regret(steps_model(s), cell_scoring(s, ranks));
        worst = std::max(worst, std::abs(exact - oracle::regret_grid(s, ranks, grid)));
    }
    const oracle::Steps two{{0.5, 0.5}, {0.8, 0.2}};
    const double reversed = scoring_regret(steps_model(two), cell_scoring(two, {1.0, 2.0}));
    return {worst <= 1e-6 && std::abs(reversed - 0.75) <= 1e-12,
            fmt("max |breakpoint - grid| %.3g over 20 models; reversed two-cell %.15g", worst, reversed)};
}

Verdict gap_oracle() {
    const double step = 1e-5;
    Rng rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        oracle::Steps s;
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 9);
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            s.widths.push_back(0.05 + rng.uniform());
            total += s.widths.back();
            s.values.push_back(0.02 + 0.96 * rng.uniform());
        }
        for (auto& w : s.widths) w /= total;
        const double x = rng.uniform();
        const double eps = 0.02 + 0.3 * rng.uniform();
        const auto g = gap(steps_model(s), std::vector<double>{x}, eps);
        worst = std::max(worst, std::abs(g.gap - oracle::gap_scan(s, g.eta, eps, step)));
    }
    const double flat = gap(PosteriorModel::constant(0.5), std::vector<double>{0.3}, 0.1).gap;
    const double top = gap(PosteriorModel::uniform_steps({0.8, 0.2}), std::vector<double>{0.25}, 0.1).gap;
    return {worst <= step && std::abs(flat - 0.025) <= 1e-12 && std::abs(top - 0.02) <= 1e-12,
            fmt("max |scan - grid| %.3g; constant %.15g; two-cell %.15g", worst, flat, top)};
}

Verdict kl_coverage() {
    const int trials = 10000;
    const double floor = 0.99 - 3.0 * std::sqrt(0.01 * 0.99 / trials);
    Rng rng(6);
    double lowest = 1.0;
    for (double mu : {0.1, 0.5, 0.9}) {
        for (int n : {10, 100}) {
            const double budget = std::log(1.0 / 0.01) / n;
            int covered = 0;
            for (int t = 0; t < trials; ++t) {
                PointStats s;
                for (int k = 0; k < n; ++k) s.add(rng.bernoulli(mu));
                covered += kl_lcb(s, budget) <= mu && mu <= kl_ucb(s, budget) ? 1 : 0;
            }
            lowest = std::min(lowest, static_cast<double>(covered) / trials);
        }
    }
    return {lowest >= floor, fmt("lowest coverage %.4f (floor %.4f)", lowest, floor)};
}

Verdict pac_continuous() {
    const auto model = PosteriorModel::gaussian_label(std::vector<double>{1.0, 0.0}, 1.0, 0.5);
    const std::size_t runs = 50;
    std::size_t failures = 0;
    std::size_t capped = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        Rng rng(split_seed(7, r));
        const auto rec = run_kltcrank(params(0.1), 0.5, model, rng, {});
        failures += rec.terminal_regret > 0.1 ? 1 : 0;
        capped += rec.cap_hit ? 1 : 0;
    }
    const double frac = static_cast<double>(failures) / runs;
    return {frac <= pac_threshold(runs) && capped == 0,
            fmt("failure fraction %.3f (limit %.3f), %g capped runs", frac, pac_threshold(runs),
                static_cast<double>(capped))};
}

Verdict determinism() {
    const fs::path root = fs::path(ACTIVERANK_TEST_TMP) / "acceptance_determinism";
    fs::remove_all(root);
    const nlohmann::json base{{"scenario", "rw1"},    {"model", {{"steps", 20}}}, {"algorithm", "klcrank"},
                              {"c", kC},              {"replicates", 8},          {"master_seed", 2024},
                              {"max_samples", 200000}};
    auto run = [&](const std::string& name, std::size_t workers) {
        auto j = base;
        j["output_dir"] = (root / name).string();
        j["workers"] = workers;
        run_experiment(ExperimentConfig::from_json(j));
        return read_text(root / name / "summary.csv");
    };
    const std::string a = run("first", 1);
    const std::string b = run("second", 1);
    const std::string c = run("eight", 8);
    return {!a.empty() && a == b && a == c,
            std::string(a == b ? "repeat identical" : "repeat differs") + ", " +
                (a == c ? "1 vs 8 workers identical" : "1 vs 8 workers differ")};
}

Verdict adaptivity() {
    std::vector<double> values(8, 0.5);
    for (int k = 0; k < 8; ++k) values.push_back(0.05 + 0.05 * k);
    const auto model = PosteriorModel::uniform_steps(values);
    std::vector<double> flat;
    std::vector<double> steep;
    for (std::size_t r = 0; r < 20; ++r) {
        Rng rng(split_seed(9, r));
        const auto rec = run_to_completion(params(0.05), model, rng, {});
        double a = 0.0;
        double b = 0.0;
        for (const auto& p : rec.scoring.points) (p.location[0] < 0.5 ? a : b) += 1.0;
        flat.push_back(a);
        steep.push_back(b);
    }
    const double mf = median(flat);
    const double ms = median(steep);
    return {mf > ms, fmt("median points: flat half %g, steep half %g", mf, ms)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"PAC guarantee, binary labels", pac_binary},
        {"stopping-time scaling", stopping_time},
        {"adaptive vs fixed grid", adaptive_vs_grid},
        {"ROC regret oracle equivalence", roc_oracle},
        {"gap oracle equivalence", gap_oracle},
        {"KL bound coverage", kl_coverage},
        {"PAC guarantee, continuous labels", pac_continuous},
        {"determinism", determinism},
        {"discretization adaptivity", adaptivity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %zu (%s): %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
