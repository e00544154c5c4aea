#include "activerank/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace activerank {

bool elimination_condition(double mean, std::size_t neighbours, double max_width, double p_hat, double epsilon,
                           double d_over_beta) noexcept {
    const double scale =
        std::min(epsilon * p_hat / (std::pow(max_width, d_over_beta) * static_cast<double>(neighbours)), 1.0);
    return max_width <= scale * (1.0 - mean);
}

void elimination_flags_sorted(std::span<const double> sorted_means, double max_width, double p_hat, double epsilon,
                              double d_over_beta, std::vector<char>& flags) {
    const std::size_t n = sorted_means.size();
    flags.assign(n, 0);
    const double radius = kNeighbourhoodFactor * max_width;
    const double numerator = epsilon * p_hat / std::pow(max_width, d_over_beta);
    // |U| >= 1 and the lowest mean has the largest (1 - mean): nobody qualifies if it fails.
    if (n == 0 || max_width > std::min(numerator, 1.0) * (1.0 - sorted_means[0])) return;
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = sorted_means[i];
        while (m - sorted_means[lo] > radius) ++lo;
        if (hi < i) hi = i;
        while (hi + 1 < n && sorted_means[hi + 1] - m <= radius) ++hi;
        const double scale = std::min(numerator / static_cast<double>(hi - lo + 1), 1.0);
        flags[i] = max_width <= scale * (1.0 - m) ? 1 : 0;
    }
}

std::vector<std::size_t> elimination_set(std::span<const ActiveView> active, double max_width, double p_hat,
                                         double epsilon, double d_over_beta) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (active[i].sampled) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return active[a].mean < active[b].mean; });
    std::vector<double> means(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) means[k] = active[order[k]].mean;
    std::vector<char> flags;
    elimination_flags_sorted(means, max_width, p_hat, epsilon, d_over_beta, flags);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (flags[k]) out.push_back(order[k]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int refinement_level(double max_width, double beta) {
    const double target = std::pow(max_width, 1.0 / beta);
    int n = 0;
    while (std::ldexp(1.0, -n) > target && n < 60) ++n;
    return n;
}

}  // namespace activerank
