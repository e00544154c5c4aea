#include "activerank/geometry.hpp"

#include <algorithm>

namespace activerank {

double Box::volume() const noexcept {
    double v = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k) v *= std::max(0.0, hi[k] - lo[k]);
    return v;
}

bool Box::contains(std::span<const double> x) const noexcept {
    for (std::size_t k = 0; k < lo.size(); ++k) {
        if (x[k] < lo[k]) return false;
        if (x[k] >= hi[k] && !(hi[k] >= 1.0 && x[k] <= 1.0)) return false;
    }
    return true;
}

std::vector<double> Box::center() const {
    std::vector<double> c(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) c[k] = 0.5 * (lo[k] + hi[k]);
    return c;
}

Box Box::unit(std::size_t d) { return Box{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)}; }

double overlap_volume(const Box& a, const Box& b) noexcept {
    double v = 1.0;
    for (std::size_t k = 0; k < a.lo.size(); ++k) {
        const double side = std::min(a.hi[k], b.hi[k]) - std::max(a.lo[k], b.lo[k]);
        if (side <= 0.0) return 0.0;
        v *= side;
    }
    return v;
}

bool in_unit_cube(std::span<const double> x) noexcept {
    return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

}  // namespace activerank
