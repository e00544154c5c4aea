#include "activerank/roc.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace activerank {

double RocCurve::eval(double alpha) const {
    if (points.empty()) return 0.0;
    auto it = std::upper_bound(points.begin(), points.end(), alpha,
                               [](double a, const RocPoint& p) { return a < p.alpha; });
    if (it == points.begin()) return points.front().tpr;
    if (it == points.end()) return points.back().tpr;
    const RocPoint& left = *std::prev(it);
    if (left.alpha == alpha) return left.tpr;
    const RocPoint& right = *it;
    const double u = (alpha - left.alpha) / (right.alpha - left.alpha);
    return left.tpr + u * (right.tpr - left.tpr);
}

double RocCurve::eval_left(double alpha) const {
    if (points.empty()) return 0.0;
    auto it = std::lower_bound(points.begin(), points.end(), alpha,
                               [](const RocPoint& p, double a) { return p.alpha < a; });
    if (it == points.end()) return points.back().tpr;
    if (it->alpha == alpha || it == points.begin()) return it->tpr;
    const RocPoint& left = *std::prev(it);
    const double u = (alpha - left.alpha) / (it->alpha - left.alpha);
    return left.tpr + u * (it->tpr - left.tpr);
}

bool RocCurve::is_concave(double tol) const {
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < points.size(); ++k) {
        const double da = points[k].alpha - points[k - 1].alpha;
        const double dr = points[k].tpr - points[k - 1].tpr;
        const double slope = da > 0.0 ? dr / da : std::numeric_limits<double>::infinity();
        if (slope > prev_slope + tol) return false;
        prev_slope = slope;
    }
    return true;
}

std::size_t ScoringOutput::owner(std::span<const double> x) const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (const auto& b : points[i].region) {
            if (b.contains(x)) return i;
        }
    }
    throw std::domain_error("scoring: x is not covered by any region");
}

RocCurve roc_from_pieces(std::vector<RocPiece> pieces) {
    std::erase_if(pieces, [](const RocPiece& p) { return p.width <= 0.0; });
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const RocPiece& a, const RocPiece& b) { return a.score > b.score; });
    double p = 0.0;
    double total = 0.0;
    for (const auto& piece : pieces) {
        p += piece.mass;
        total += piece.width;
    }
    const double neg = total - p;
    if (!(p > 0.0) || !(neg > 0.0)) throw std::domain_error("roc: positive mass must lie strictly inside (0,1)");

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    double cum_mass = 0.0;
    double cum_neg = 0.0;
    for (std::size_t k = 0; k < pieces.size();) {
        std::size_t j = k;
        for (; j < pieces.size() && pieces[j].score == pieces[k].score; ++j) {
            cum_mass += pieces[j].mass;
            cum_neg += pieces[j].width - pieces[j].mass;
        }
        k = j;
        const bool last = k == pieces.size();
        curve.points.push_back({last ? 1.0 : std::clamp(cum_neg / neg, 0.0, 1.0),
                                last ? 1.0 : std::clamp(cum_mass / p, 0.0, 1.0)});
    }
    return curve;
}

RocCurve optimal_roc(const PosteriorModel& model) {
    const PosteriorModel table =
        model.is_piecewise() ? model : model.tabulate(analytic_tabulation_resolution(model.dimension()));
    std::vector<RocPiece> pieces;
    pieces.reserve(table.cells().size());
    for (const auto& c : table.cells()) {
        const double w = c.box.volume();
        pieces.push_back({c.eta, w, c.eta * w});
    }
    return roc_from_pieces(std::move(pieces));
}

RocCurve scoring_roc(const PosteriorModel& model, const ScoringOutput& scoring) {
    std::vector<RocPiece> pieces;
    pieces.reserve(scoring.points.size());
    for (const auto& pt : scoring.points) {
        RocPiece piece{static_cast<double>(pt.rank), 0.0, 0.0};
        for (const auto& b : pt.region) {
            piece.width += b.volume();
            piece.mass += model.integrate(b);
        }
        pieces.push_back(piece);
    }
    return roc_from_pieces(std::move(pieces));
}

double sup_regret(const RocCurve& opt, const RocCurve& cand) {
    double worst = 0.0;
    // Left limits matter only across vertical segments.
    auto probe = [&](double a) {
        worst = std::max({worst, opt.eval(a) - cand.eval(a), opt.eval_left(a) - cand.eval_left(a)});
    };
    for (const auto& pt : opt.points) probe(pt.alpha);
    for (const auto& pt : cand.points) probe(pt.alpha);
    return std::max(0.0, worst);
}

double scoring_regret(const PosteriorModel& model, const ScoringOutput& scoring) {
    return sup_regret(optimal_roc(model), scoring_roc(model, scoring));
}

std::string roc_to_csv(const RocCurve& curve) {
    std::string out = "alpha,tpr\n";
    char buf[64];
    for (const auto& pt : curve.points) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", pt.alpha, pt.tpr);
        out += buf;
    }
    return out;
}

}  // namespace activerank
