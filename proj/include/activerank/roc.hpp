#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "activerank/geometry.hpp"
#include "activerank/posterior.hpp"

namespace activerank {

struct RocPoint {
    double alpha = 0.0;  // false-positive rate
    double tpr = 0.0;
};

/// Broken-line ROC curve. Breakpoints run from (0,0) to (1,1) with non-decreasing alpha
/// and tpr; alpha repeats only across a vertical segment (a region where eta = 1).
struct RocCurve {
    std::vector<RocPoint> points;

    /// Linear interpolation; at a vertical segment the upper value is returned.
    [[nodiscard]] double eval(double alpha) const;
    /// Left limit at alpha; differs from eval only at a vertical segment.
    [[nodiscard]] double eval_left(double alpha) const;
    [[nodiscard]] bool is_concave(double tol = 1e-12) const;
};

/// One query point of a scoring rule and the part of the cube it scores.
struct ScoredPoint {
    std::vector<double> location;
    int level = 0;
    std::size_t rank = 0;
    std::vector<Box> region;
};

/// Rank-valued piecewise-constant scoring function. Larger rank = higher score.
struct ScoringOutput {
    std::size_t dimension = 1;
    std::vector<ScoredPoint> points;

    /// Index of the point whose region contains x. Throws std::domain_error if none does.
    [[nodiscard]] std::size_t owner(std::span<const double> x) const;
    [[nodiscard]] std::size_t score(std::span<const double> x) const { return points[owner(x)].rank; }
};

/// A block of the cube scored uniformly: its volume and the eta-mass it carries.
struct RocPiece {
    double score = 0.0;
    double width = 0.0;
    double mass = 0.0;
};

/// Broken line from pieces sorted by score descending; equal scores share one segment.
/// Throws std::domain_error when p is 0 or 1.
RocCurve roc_from_pieces(std::vector<RocPiece> pieces);

/// ROC of eta itself.
RocCurve optimal_roc(const PosteriorModel& model);
/// ROC of a scoring rule evaluated against the true posterior.
RocCurve scoring_roc(const PosteriorModel& model, const ScoringOutput& scoring);
/// sup over alpha of opt(alpha) - cand(alpha), floored at 0.
double sup_regret(const RocCurve& opt, const RocCurve& cand);

/// Convenience: sup_regret(optimal_roc(model), scoring_roc(model, scoring)).
double scoring_regret(const PosteriorModel& model, const ScoringOutput& scoring);

/// `alpha,tpr` CSV.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace activerank
