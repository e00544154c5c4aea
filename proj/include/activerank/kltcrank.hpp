#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "activerank/klcrank.hpp"
#include "activerank/label_source.hpp"

namespace activerank {

/// Round-based continuous-label variant with DKW radii at a fixed threshold rho.
/// Per-point stats count samples (pulls) and samples with Y >= rho (successes);
/// the exploration constant params.c is unused.
class KltcRank {
public:
    KltcRank(const RankParams& params, double rho);

    /// One round: a uniform draw for the global proportion, one label per active point,
    /// then elimination and refinement. Returns the terminal scoring when S empties.
    std::optional<ScoringOutput> round(const ContinuousLabelSource& labels, Rng& rng);

    [[nodiscard]] bool finished() const noexcept { return points_.empty_region(); }
    [[nodiscard]] std::uint64_t rounds() const noexcept { return round_; }
    [[nodiscard]] std::uint64_t samples() const noexcept { return samples_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] double rho() const noexcept { return rho_; }
    [[nodiscard]] const PointSet& points() const noexcept { return points_; }
    [[nodiscard]] const PointStats& proportion_stats() const noexcept { return f0_; }
    [[nodiscard]] const RankParams& params() const noexcept { return params_; }
    /// Largest DKW radius over active points, each at its own sample count (1 if unsampled).
    [[nodiscard]] double max_radius() const;
    [[nodiscard]] ScoringOutput scoring() const;

private:
    RankParams params_;
    double rho_;
    PointSet points_;
    PointStats f0_;
    std::uint64_t round_ = 0;
    std::uint64_t samples_ = 0;
    double radius_ = 1.0;
    std::vector<double> uniform_x_;
};

RunRecord run_kltcrank(const RankParams& params, double rho, const PosteriorModel& model, Rng& rng,
                       const std::vector<std::uint64_t>& checkpoints);

}  // namespace activerank
