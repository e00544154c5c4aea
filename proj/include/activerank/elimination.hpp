#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace activerank {

/// Mean estimate of one active point as seen by the elimination rule.
struct ActiveView {
    double mean = 0.0;
    bool sampled = false;
};

// Neighbourhood radius multiplier in U_i(6 * max_width).
inline constexpr double kNeighbourhoodFactor = 6.0;

/// The per-point test: max_width <= min(eps * p_hat / (max_width^(d/beta) * neighbours), 1) * (1 - mean).
bool elimination_condition(double mean, std::size_t neighbours, double max_width, double p_hat, double epsilon,
                           double d_over_beta) noexcept;

/// Indices (into `active`) of the points to eliminate. `neighbours` counts sampled active
/// points whose mean lies within 6 * max_width of the point's own mean, itself included.
/// Unsampled points are never eliminated and are not counted as neighbours.
std::vector<std::size_t> elimination_set(std::span<const ActiveView> active, double max_width, double p_hat,
                                         double epsilon, double d_over_beta);

/// Same rule over means already sorted ascending; writes flags aligned with `sorted_means`.
void elimination_flags_sorted(std::span<const double> sorted_means, double max_width, double p_hat, double epsilon,
                              double d_over_beta, std::vector<char>& flags);

/// min{n >= 0 : 2^-n <= max_width^(1/beta)}.
int refinement_level(double max_width, double beta);

}  // namespace activerank
