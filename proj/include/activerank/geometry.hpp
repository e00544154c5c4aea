#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace activerank {

/// Axis-aligned box [lo, hi) in [0,1]^d.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    [[nodiscard]] std::size_t dimension() const noexcept { return lo.size(); }
    [[nodiscard]] double volume() const noexcept;
    /// Half-open membership, closed on the upper face of the unit cube.
    [[nodiscard]] bool contains(std::span<const double> x) const noexcept;
    [[nodiscard]] std::vector<double> center() const;

    static Box unit(std::size_t d);
};

/// Volume of the intersection of two boxes of equal dimension.
double overlap_volume(const Box& a, const Box& b) noexcept;

/// True when every coordinate of x lies in [0,1].
bool in_unit_cube(std::span<const double> x) noexcept;

}  // namespace activerank
