#pragma once

#include <cstdint>

namespace activerank {

// Absolute tolerance on the probability axis for every inversion below.
inline constexpr double kBoundTolerance = 1e-9;

/// Bernoulli sample statistics for one query point (or for the global p-hat channel).
struct PointStats {
    std::uint64_t pulls = 0;
    std::uint64_t successes = 0;
    // Confidence width from the previous update; 1 before any sample.
    double last_width = 1.0;

    [[nodiscard]] bool sampled() const noexcept { return pulls > 0; }
    /// Empirical mean. Requires pulls > 0.
    [[nodiscard]] double mean() const;
    void add(bool label) noexcept {
        ++pulls;
        successes += label ? 1u : 0u;
    }
};

/// kl(a, b) between Bernoulli(a) and Bernoulli(b), with 0 ln 0 = 0.
/// Returns +inf when b is 0 or 1 and a != b. Throws std::domain_error outside [0,1].
double bernoulli_kl(double a, double b);

/// Largest q in [mean, 1] with kl(mean, q) <= budget.
double kl_ucb(double mean, double budget);
/// Smallest q in [0, mean] with kl(mean, q) <= budget.
double kl_lcb(double mean, double budget);

// Stats-level overloads; budget is the per-sample exploration budget beta / N.
// Throw std::invalid_argument when stats.pulls == 0.
double kl_ucb(const PointStats& stats, double budget);
double kl_lcb(const PointStats& stats, double budget);

/// c * ln(t^2 * width^(-d_over_beta) / delta).
double exploration_rate(std::uint64_t t, double width, double delta, double c, double d_over_beta);

/// Smallest radius in (0,1] with r >= sqrt(ln(t^2 r^(-d_over_beta) / delta) / t); 1 if none.
double dkw_radius(std::uint64_t t, double delta, double d_over_beta);

/// Applies the lagged exploration rate at global time t and refreshes last_width.
/// Returns the new width ucb - lcb. Requires stats.pulls > 0.
double refresh_width(PointStats& stats, std::uint64_t t, double delta, double c, double d_over_beta);

}  // namespace activerank
