#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "activerank/geometry.hpp"
#include "activerank/kl_confidence.hpp"
#include "activerank/roc.hpp"

namespace activerank {

inline constexpr std::size_t kMaxDimension = 3;

/// Dyadic cell of side 2^-level (or a uniform-grid cell when the set is a fixed grid).
struct CellKey {
    int level = 0;
    std::array<std::uint32_t, kMaxDimension> index{};

    auto operator<=>(const CellKey&) const = default;
};

/// Deeper level first, then lexicographic index.
inline bool sampling_precedes(const CellKey& a, const CellKey& b) noexcept {
    if (a.level != b.level) return a.level > b.level;
    return a.index < b.index;
}

struct GridPoint {
    CellKey key;
    Box cell;
    std::vector<double> location;
    PointStats stats;
    bool active = false;
    // Nearest ancestor present in the set, -1 for roots.
    std::ptrdiff_t parent = -1;
    bool has_children = false;
};

/// The query points X together with the active region S, stored as the cells of the
/// active points. Points are never removed; elimination only clears `active`.
class PointSet {
public:
    /// All 2^(d*level) dyadic cells of side 2^-level, active.
    static PointSet dyadic(std::size_t d, int level);
    /// K^d uniform cells of side 1/K, active. No refinement applies to these.
    static PointSet uniform_grid(std::size_t d, std::size_t cells_per_dim);

    [[nodiscard]] std::size_t dimension() const noexcept { return d_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] const GridPoint& operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] GridPoint& mutable_point(std::size_t i) { return points_[i]; }
    [[nodiscard]] const std::vector<GridPoint>& points() const noexcept { return points_; }
    /// Indices of the active points in insertion order.
    [[nodiscard]] const std::vector<std::size_t>& active() const noexcept { return active_; }
    [[nodiscard]] bool empty_region() const noexcept { return active_.empty(); }
    [[nodiscard]] double active_measure() const;
    [[nodiscard]] std::ptrdiff_t find(const CellKey& key) const;

    void deactivate(std::size_t i);
    /// Splits every active cell coarser than `level` into its level-`level` descendants,
    /// which become active with fresh stats. Returns the indices of the new points.
    std::vector<std::size_t> refine(int level);

    /// Ranks all points by `scores` ascending (unsampled points lowest, in key order).
    /// Each leaf cell is scored by its own point when sampled, else by its nearest sampled
    /// ancestor, else by itself.
    [[nodiscard]] ScoringOutput scoring(std::span<const double> scores) const;

private:
    std::size_t add(const CellKey& key, const Box& cell, std::ptrdiff_t parent, bool active);

    std::size_t d_ = 1;
    bool dyadic_ = true;
    std::vector<GridPoint> points_;
    std::vector<std::size_t> active_;
    std::map<CellKey, std::size_t> lookup_;
};

}  // namespace activerank
