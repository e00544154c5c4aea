#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "activerank/kl_confidence.hpp"
#include "activerank/label_source.hpp"
#include "activerank/point_set.hpp"
#include "activerank/posterior.hpp"
#include "activerank/rng.hpp"
#include "activerank/run_record.hpp"

namespace activerank {

inline constexpr std::uint64_t kDefaultSampleCap = 10'000'000;

struct RankParams {
    double epsilon = 0.1;
    double delta = 0.1;
    double beta = 1.0;  // declared smoothness
    double c = 1.0;     // exploration constant
    std::size_t dimension = 1;
    std::uint64_t max_samples = kDefaultSampleCap;

    [[nodiscard]] double d_over_beta() const noexcept { return static_cast<double>(dimension) / beta; }
    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

/// Adaptive-discretization KL-confidence elimination. The same engine runs the fixed-grid
/// baseline when constructed with refinement disabled.
class KlcRank {
public:
    /// Initial state: the 2^d cells of side 1/2, refinement on.
    explicit KlcRank(const RankParams& params);
    /// Arbitrary initial point set; `refine` toggles dyadic refinement.
    KlcRank(const RankParams& params, PointSet initial, bool refine);

    /// One loop iteration: proportion channel or widest active point, then elimination and
    /// refinement. Returns the terminal scoring once the active region is empty. Sampling
    /// stops early when the global count reaches `sample_limit`.
    std::optional<ScoringOutput> step(const BinaryLabelSource& labels, Rng& rng,
                                      std::uint64_t sample_limit = UINT64_MAX);

    [[nodiscard]] bool finished() const noexcept { return points_.empty_region(); }
    [[nodiscard]] std::uint64_t time() const noexcept { return t_; }
    [[nodiscard]] const PointSet& points() const noexcept { return points_; }
    [[nodiscard]] const PointStats& proportion_stats() const noexcept { return p_stats_; }
    [[nodiscard]] const RankParams& params() const noexcept { return params_; }
    [[nodiscard]] double proportion_estimate() const;

    /// Largest confidence width over active points (unsampled points count as 1); 0 when S is empty.
    [[nodiscard]] double max_width() const;
    /// Active point with the largest width; ties go to the deeper level, then lexicographic index.
    [[nodiscard]] std::optional<std::size_t> select_point() const;
    /// Points of the elimination set at the current state, without applying the p-hat guard.
    [[nodiscard]] std::vector<std::size_t> elimination_set() const;
    /// Scoring over all of X by empirical mean; provisional while the run is in progress.
    [[nodiscard]] ScoringOutput scoring() const;

    /// Test hooks: overwrite statistics to drive decisions directly.
    void set_point_stats(std::size_t i, const PointStats& stats);
    void set_proportion_stats(const PointStats& stats) { p_stats_ = stats; }
    /// Applies elimination (when the guard holds) and then refinement.
    void eliminate_and_refine();

private:
    void sample_proportion(const BinaryLabelSource& labels, Rng& rng);
    void sample_point(std::size_t i, const BinaryLabelSource& labels, Rng& rng);
    void record_mean(std::size_t i);
    void drop_mean(std::size_t i);
    [[nodiscard]] std::pair<std::size_t, double> widest_point() const;
    [[nodiscard]] std::vector<std::size_t> elimination_set(double widest) const;
    // Both take the current max width; eliminate returns it after removals.
    double eliminate(double widest);
    void refine(double widest);
    void enqueue(std::size_t i);
    void dequeue(std::size_t i);

    struct QueueEntry {
        double width;
        CellKey key;
        std::size_t index;
        // Widest first; ties go to the deeper level, then lexicographic index.
        bool operator<(const QueueEntry& o) const noexcept {
            if (width != o.width) return width > o.width;
            if (key != o.key) return sampling_precedes(key, o.key);
            return index < o.index;
        }
    };

    RankParams params_;
    PointSet points_;
    bool refine_ = true;
    PointStats p_stats_;
    std::uint64_t t_ = 0;
    // Means of sampled active points, ascending, with their point indices alongside.
    std::vector<double> sorted_vals_;
    std::vector<std::size_t> sorted_ids_;
    std::vector<double> uniform_x_;
    mutable std::vector<char> flags_;
    // Active points ordered for sampling, with the width each was queued under.
    std::set<QueueEntry> queue_;
    std::vector<double> queued_width_;
    // Every active point sits at this level or deeper.
    int refined_level_ = 0;
};

/// Runs to an empty active region or to params.max_samples, recording regret at each budget.
RunRecord run_to_completion(const RankParams& params, const PosteriorModel& model, Rng& rng,
                            const std::vector<std::uint64_t>& checkpoints);

/// Shared driver for engines constructed by the caller (the fixed-grid baseline uses it).
RunRecord run_engine(KlcRank& engine, const PosteriorModel& model, Rng& rng,
                     const std::vector<std::uint64_t>& checkpoints);

}  // namespace activerank
