#include "activerank/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace activerank {

namespace {

void check_dimension(std::size_t d) {
    if (d == 0 || d > kMaxDimension) throw std::invalid_argument("point set: dimension must be in 1..3");
}

Box dyadic_box(std::size_t d, const CellKey& key) {
    Box b{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t k = 0; k < d; ++k) {
        b.lo[k] = std::ldexp(static_cast<double>(key.index[k]), -key.level);
        b.hi[k] = std::ldexp(static_cast<double>(key.index[k] + 1), -key.level);
    }
    return b;
}

// Visits every index vector in [lo, lo + span)^d in lexicographic order.
template <class F>
void for_each_index(std::size_t d, const std::array<std::uint32_t, kMaxDimension>& lo, std::uint64_t span, F&& f) {
    std::array<std::uint32_t, kMaxDimension> idx{};
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < d; ++k) total *= span;
    for (std::uint64_t n = 0; n < total; ++n) {
        std::uint64_t rem = n;
        for (std::size_t k = d; k-- > 0;) {
            idx[k] = lo[k] + static_cast<std::uint32_t>(rem % span);
            rem /= span;
        }
        f(idx);
    }
}

}  // namespace

PointSet PointSet::dyadic(std::size_t d, int level) {
    check_dimension(d);
    if (level < 0 || level * static_cast<int>(d) > 24) throw std::invalid_argument("point set: level out of range");
    PointSet s;
    s.d_ = d;
    s.dyadic_ = true;
    for_each_index(d, {}, std::uint64_t{1} << level, [&](const auto& idx) {
        CellKey key{level, idx};
        s.add(key, dyadic_box(d, key), -1, true);
    });
    return s;
}

PointSet PointSet::uniform_grid(std::size_t d, std::size_t cells_per_dim) {
    check_dimension(d);
    if (cells_per_dim < 1) throw std::invalid_argument("point set: grid needs at least one cell per dimension");
    PointSet s;
    s.d_ = d;
    s.dyadic_ = false;
    const double k_cells = static_cast<double>(cells_per_dim);
    const int level = static_cast<int>(std::ceil(std::log2(k_cells)));
    for_each_index(d, {}, cells_per_dim, [&](const auto& idx) {
        Box b{std::vector<double>(d), std::vector<double>(d)};
        for (std::size_t k = 0; k < d; ++k) {
            b.lo[k] = static_cast<double>(idx[k]) / k_cells;
            b.hi[k] = idx[k] + 1 == cells_per_dim ? 1.0 : static_cast<double>(idx[k] + 1) / k_cells;
        }
        s.add(CellKey{level, idx}, b, -1, true);
    });
    return s;
}

std::size_t PointSet::add(const CellKey& key, const Box& cell, std::ptrdiff_t parent, bool active) {
    GridPoint p;
    p.key = key;
    p.cell = cell;
    p.location = cell.center();
    p.active = active;
    p.parent = parent;
    const std::size_t i = points_.size();
    points_.push_back(std::move(p));
    lookup_.emplace(key, i);
    if (active) active_.push_back(i);
    return i;
}

double PointSet::active_measure() const {
    double m = 0.0;
    for (auto i : active_) m += points_[i].cell.volume();
    return m;
}

std::ptrdiff_t PointSet::find(const CellKey& key) const {
    auto it = lookup_.find(key);
    return it == lookup_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

void PointSet::deactivate(std::size_t i) {
    if (!points_[i].active) return;
    points_[i].active = false;
    std::erase(active_, i);
}

std::vector<std::size_t> PointSet::refine(int level) {
    std::vector<std::size_t> added;
    if (!dyadic_) return added;
    if (level * static_cast<int>(d_) > 24) throw std::runtime_error("point set: refinement depth exceeds limit");
    std::vector<std::size_t> coarse;
    for (auto i : active_) {
        if (points_[i].key.level < level) coarse.push_back(i);
    }
    for (auto i : coarse) {
        const CellKey parent_key = points_[i].key;
        points_[i].active = false;
        points_[i].has_children = true;
        const int shift = level - parent_key.level;
        std::array<std::uint32_t, kMaxDimension> lo{};
        for (std::size_t k = 0; k < d_; ++k) lo[k] = parent_key.index[k] << shift;
        for_each_index(d_, lo, std::uint64_t{1} << shift, [&](const auto& idx) {
            CellKey key{level, idx};
            if (find(key) >= 0) return;
            added.push_back(add(key, dyadic_box(d_, key), static_cast<std::ptrdiff_t>(i), true));
        });
    }
    std::erase_if(active_, [&](std::size_t i) { return !points_[i].active; });
    return added;
}

ScoringOutput PointSet::scoring(std::span<const double> scores) const {
    const std::size_t n = points_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool sa = points_[a].stats.sampled();
        const bool sb = points_[b].stats.sampled();
        if (sa != sb) return !sa;
        if (sa && scores[a] != scores[b]) return scores[a] < scores[b];
        return points_[a].key < points_[b].key;
    });

    ScoringOutput out;
    out.dimension = d_;
    out.points.resize(n);
    for (std::size_t r = 0; r < n; ++r) out.points[order[r]].rank = r + 1;
    for (std::size_t i = 0; i < n; ++i) {
        out.points[i].location = points_[i].location;
        out.points[i].level = points_[i].key.level;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (points_[i].has_children) continue;
        std::ptrdiff_t owner = static_cast<std::ptrdiff_t>(i);
        while (owner >= 0 && !points_[owner].stats.sampled()) owner = points_[owner].parent;
        if (owner < 0) owner = static_cast<std::ptrdiff_t>(i);
        out.points[owner].region.push_back(points_[i].cell);
    }
    return out;
}

}  // namespace activerank
