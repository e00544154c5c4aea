#include "activerank/kltcrank.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "activerank/elimination.hpp"

namespace activerank {

KltcRank::KltcRank(const RankParams& params, double rho)
    : params_(params), rho_(rho), points_(PointSet::dyadic(params.dimension, 1)), uniform_x_(params.dimension) {
    params_.validate();
}

double KltcRank::max_radius() const {
    std::uint64_t fewest = std::numeric_limits<std::uint64_t>::max();
    for (auto i : points_.active()) fewest = std::min(fewest, points_[i].stats.pulls);
    if (fewest == std::numeric_limits<std::uint64_t>::max()) return 0.0;
    if (fewest == 0) return 1.0;
    // The radius is non-increasing in the sample count.
    return dkw_radius(fewest, params_.delta, params_.d_over_beta());
}

ScoringOutput KltcRank::scoring() const {
    std::vector<double> scores(points_.size(), 0.0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].stats.sampled()) scores[i] = points_[i].stats.mean();
    }
    return points_.scoring(scores);
}

std::optional<ScoringOutput> KltcRank::round(const ContinuousLabelSource& labels, Rng& rng) {
    if (finished()) throw std::logic_error("KltcRank::round: active region is empty");
    ++round_;
    for (auto& v : uniform_x_) v = rng.uniform();
    f0_.add(labels.draw(uniform_x_, rng) >= rho_);
    ++samples_;
    for (auto i : points_.active()) {
        auto& p = points_.mutable_point(i);
        p.stats.add(labels.draw(p.location, rng) >= rho_);
        ++samples_;
    }

    radius_ = max_radius();
    const double f0 = f0_.mean();
    if (radius_ <= f0 / 4.0) {
        const auto& active = points_.active();
        std::vector<ActiveView> views(active.size());
        for (std::size_t k = 0; k < active.size(); ++k) {
            const auto& s = points_[active[k]].stats;
            views[k] = ActiveView{s.sampled() ? s.mean() : 0.0, s.sampled()};
        }
        const auto doomed = elimination_set(views, radius_, f0, params_.epsilon, params_.d_over_beta());
        std::vector<std::size_t> ids;
        ids.reserve(doomed.size());
        for (auto k : doomed) ids.push_back(active[k]);
        for (auto i : ids) points_.deactivate(i);
    }
    if (!points_.empty_region()) {
        points_.refine(refinement_level(max_radius(), params_.beta));
    }
    if (finished()) return scoring();
    return std::nullopt;
}

RunRecord run_kltcrank(const RankParams& params, double rho, const PosteriorModel& model, Rng& rng,
                       const std::vector<std::uint64_t>& checkpoints) {
    if (model.kind() != ModelKind::continuous_label_gaussian) {
        throw std::invalid_argument("kltcrank: model must carry continuous labels");
    }
    if (params.dimension != model.dimension()) throw std::invalid_argument("kltcrank: model dimension mismatch");
    if (rho != model.rho()) throw std::invalid_argument("kltcrank: threshold differs from the model's rho");
    const auto start = std::chrono::steady_clock::now();
    KltcRank engine(params, rho);
    const ContinuousLabelSource labels(model);
    const RocCurve best = optimal_roc(model);
    CheckpointTracker tracker(checkpoints);
    auto regret = [&] { return sup_regret(best, scoring_roc(model, engine.scoring())); };
    tracker.update(0, regret);

    std::optional<ScoringOutput> terminal;
    while (!engine.finished() && engine.samples() < params.max_samples) {
        terminal = engine.round(labels, rng);
        tracker.update(engine.samples(), regret);
    }

    RunRecord rec;
    rec.algorithm = "kltcrank";
    rec.rho = rho;
    rec.tau = engine.samples();
    rec.rounds = engine.rounds();
    rec.cap_hit = !engine.finished();
    rec.scoring = terminal ? std::move(*terminal) : engine.scoring();
    rec.terminal_regret = sup_regret(best, scoring_roc(model, rec.scoring));
    tracker.finish(rec.terminal_regret);
    rec.checkpoints = tracker.take();
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

}  // namespace activerank
