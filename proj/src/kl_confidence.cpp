#include "activerank/kl_confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace activerank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx_ratio(double x, double y) {
    if (x == 0.0) return 0.0;
    if (y == 0.0) return kInf;
    return x * std::log(x / y);
}

// d/dq kl(mean, q)
double kl_derivative(double mean, double q) { return (q - mean) / (q * (1.0 - q)); }

// kl without argument checks, for the inversion loops (arguments are in range there).
double kl_unchecked(double a, double b) {
    if (a == b) return 0.0;
    const double v = xlogx_ratio(a, b) + xlogx_ratio(1.0 - a, 1.0 - b);
    return v < 0.0 ? 0.0 : v;
}

void check_budget(double budget) {
    if (!(budget >= 0.0)) throw std::domain_error("kl bound: budget must be nonnegative");
}

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(what);
}

}  // namespace

double PointStats::mean() const {
    if (pulls == 0) throw std::invalid_argument("PointStats::mean: no samples");
    return static_cast<double>(successes) / static_cast<double>(pulls);
}

double bernoulli_kl(double a, double b) {
    check_probability(a, "bernoulli_kl: a outside [0,1]");
    check_probability(b, "bernoulli_kl: b outside [0,1]");
    return kl_unchecked(a, b);
}

// Both inversions bracket the root and take Newton steps from the infeasible side,
// falling back to bisection whenever the step leaves the bracket. kl(mean, .) is convex on
// each side of mean, so Newton from the outside converges monotonically. Iteration stops
// once the bracket is narrower than kBoundTolerance, and the feasible end is returned.
double kl_ucb(double mean, double budget) {
    check_probability(mean, "kl_ucb: mean outside [0,1]");
    check_budget(budget);
    if (budget == 0.0 || mean == 1.0) return mean;
    if (kl_unchecked(mean, 1.0) <= budget) return 1.0;

    double lo = mean;  // feasible
    // Pinsker: kl >= 2 (q - mean)^2, so the root lies below mean + sqrt(budget / 2).
    double hi = std::min(1.0, mean + std::sqrt(budget / 2.0) + kBoundTolerance);
    if (kl_unchecked(mean, hi) <= budget) return hi;
    double q = hi;
    while (hi - lo > kBoundTolerance) {
        const double f = kl_unchecked(mean, q) - budget;
        if (f <= 0.0) {
            lo = q;
        } else {
            hi = q;
        }
        double next = q - f / kl_derivative(mean, q);
        if (!(next > lo && next < hi) || f <= 0.0) next = 0.5 * (lo + hi);
        // Once Newton is within tolerance, probe just below hi to certify the bracket.
        if (hi - next < kBoundTolerance) next = hi - kBoundTolerance;
        if (next <= lo) break;
        q = next;
    }
    return lo;
}

double kl_lcb(double mean, double budget) {
    check_probability(mean, "kl_lcb: mean outside [0,1]");
    check_budget(budget);
    if (budget == 0.0 || mean == 0.0) return mean;
    if (kl_unchecked(mean, 0.0) <= budget) return 0.0;

    double hi = mean;  // feasible
    double lo = std::max(0.0, mean - std::sqrt(budget / 2.0) - kBoundTolerance);
    if (kl_unchecked(mean, lo) <= budget) return lo;
    double q = lo;
    while (hi - lo > kBoundTolerance) {
        const double f = kl_unchecked(mean, q) - budget;
        if (f <= 0.0) {
            hi = q;
        } else {
            lo = q;
        }
        double next = q - f / kl_derivative(mean, q);
        if (!(next > lo && next < hi) || f <= 0.0) next = 0.5 * (lo + hi);
        if (next - lo < kBoundTolerance) next = lo + kBoundTolerance;
        if (next >= hi) break;
        q = next;
    }
    return hi;
}

double kl_ucb(const PointStats& stats, double budget) {
    if (stats.pulls == 0) throw std::invalid_argument("kl_ucb: point has no samples");
    return kl_ucb(stats.mean(), budget);
}

double kl_lcb(const PointStats& stats, double budget) {
    if (stats.pulls == 0) throw std::invalid_argument("kl_lcb: point has no samples");
    return kl_lcb(stats.mean(), budget);
}

double exploration_rate(std::uint64_t t, double width, double delta, double c, double d_over_beta) {
    if (t == 0) throw std::invalid_argument("exploration_rate: t must be >= 1");
    if (!(width > 0.0 && width <= 1.0)) throw std::invalid_argument("exploration_rate: width outside (0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("exploration_rate: delta outside (0,1)");
    if (!(c > 0.0) || !(d_over_beta > 0.0)) throw std::invalid_argument("exploration_rate: c and d/beta must be positive");
    const double tt = static_cast<double>(t);
    return c * (2.0 * std::log(tt) - d_over_beta * std::log(width) - std::log(delta));
}

double dkw_radius(std::uint64_t t, double delta, double d_over_beta) {
    if (t == 0) throw std::invalid_argument("dkw_radius: t must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("dkw_radius: delta outside (0,1)");
    const double tt = static_cast<double>(t);
    const double log_base = 2.0 * std::log(tt) - std::log(delta);
    // Increasing in r: r - sqrt(ln(t^2 r^-k / delta) / t).
    auto residual = [&](double r) { return r - std::sqrt((log_base - d_over_beta * std::log(r)) / tt); };
    if (residual(1.0) < 0.0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > kBoundTolerance) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double refresh_width(PointStats& stats, std::uint64_t t, double delta, double c, double d_over_beta) {
    const double budget = exploration_rate(t, stats.last_width, delta, c, d_over_beta) / static_cast<double>(stats.pulls);
    const double mean = stats.mean();
    const double width = kl_ucb(mean, budget) - kl_lcb(mean, budget);
    stats.last_width = std::clamp(width, kBoundTolerance, 1.0);
    return stats.last_width;
}

}  // namespace activerank
