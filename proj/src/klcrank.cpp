#include "activerank/klcrank.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "activerank/elimination.hpp"

namespace activerank {

void RankParams::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    if (dimension < 1 || dimension > kMaxDimension) throw std::invalid_argument("dimension must be in 1..3");
}

KlcRank::KlcRank(const RankParams& params) : KlcRank(params, PointSet::dyadic(params.dimension, 1), true) {}

KlcRank::KlcRank(const RankParams& params, PointSet initial, bool refine)
    : params_(params), points_(std::move(initial)), refine_(refine), uniform_x_(params.dimension) {
    params_.validate();
    if (points_.dimension() != params_.dimension) throw std::invalid_argument("KlcRank: point set dimension mismatch");
    refined_level_ = 64;
    for (auto i : points_.active()) {
        enqueue(i);
        refined_level_ = std::min(refined_level_, points_[i].key.level);
    }
}

void KlcRank::enqueue(std::size_t i) {
    if (queued_width_.size() < points_.size()) queued_width_.resize(points_.size(), -1.0);
    const auto& p = points_[i];
    const double w = p.stats.sampled() ? p.stats.last_width : 1.0;
    queue_.insert(QueueEntry{w, p.key, i});
    queued_width_[i] = w;
}

void KlcRank::dequeue(std::size_t i) {
    if (i >= queued_width_.size() || queued_width_[i] < 0.0) return;
    queue_.erase(QueueEntry{queued_width_[i], points_[i].key, i});
    queued_width_[i] = -1.0;
}

double KlcRank::proportion_estimate() const { return p_stats_.sampled() ? p_stats_.mean() : 0.0; }

std::pair<std::size_t, double> KlcRank::widest_point() const {
    if (queue_.empty()) return {0, 0.0};
    const auto& top = *queue_.begin();
    return {top.index, top.width};
}

double KlcRank::max_width() const { return widest_point().second; }

std::optional<std::size_t> KlcRank::select_point() const {
    if (points_.empty_region()) return std::nullopt;
    return widest_point().first;
}

std::vector<std::size_t> KlcRank::elimination_set() const { return elimination_set(max_width()); }

std::vector<std::size_t> KlcRank::elimination_set(double widest) const {
    std::vector<std::size_t> out;
    if (points_.empty_region()) return out;
    elimination_flags_sorted(sorted_vals_, widest, proportion_estimate(), params_.epsilon, params_.d_over_beta(),
                             flags_);
    for (std::size_t k = 0; k < flags_.size(); ++k) {
        if (flags_[k]) out.push_back(sorted_ids_[k]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

ScoringOutput KlcRank::scoring() const {
    std::vector<double> scores(points_.size(), 0.0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].stats.sampled()) scores[i] = points_[i].stats.mean();
    }
    return points_.scoring(scores);
}

void KlcRank::set_point_stats(std::size_t i, const PointStats& stats) {
    points_.mutable_point(i).stats = stats;
    dequeue(i);
    if (points_[i].active) enqueue(i);
    if (points_[i].active && stats.sampled()) {
        record_mean(i);
    } else {
        drop_mean(i);
    }
}

void KlcRank::record_mean(std::size_t i) {
    const double m = points_[i].stats.mean();
    auto id = std::find(sorted_ids_.begin(), sorted_ids_.end(), i);
    std::size_t k = static_cast<std::size_t>(id - sorted_ids_.begin());
    if (id == sorted_ids_.end()) {
        k = static_cast<std::size_t>(std::lower_bound(sorted_vals_.begin(), sorted_vals_.end(), m) - sorted_vals_.begin());
        sorted_vals_.insert(sorted_vals_.begin() + static_cast<std::ptrdiff_t>(k), m);
        sorted_ids_.insert(sorted_ids_.begin() + static_cast<std::ptrdiff_t>(k), i);
        return;
    }
    sorted_vals_[k] = m;
    // One entry moved; restore order by local swaps.
    while (k > 0 && sorted_vals_[k] < sorted_vals_[k - 1]) {
        std::swap(sorted_vals_[k], sorted_vals_[k - 1]);
        std::swap(sorted_ids_[k], sorted_ids_[k - 1]);
        --k;
    }
    while (k + 1 < sorted_vals_.size() && sorted_vals_[k + 1] < sorted_vals_[k]) {
        std::swap(sorted_vals_[k], sorted_vals_[k + 1]);
        std::swap(sorted_ids_[k], sorted_ids_[k + 1]);
        ++k;
    }
}

void KlcRank::drop_mean(std::size_t i) {
    auto id = std::find(sorted_ids_.begin(), sorted_ids_.end(), i);
    if (id == sorted_ids_.end()) return;
    const auto k = id - sorted_ids_.begin();
    sorted_ids_.erase(id);
    sorted_vals_.erase(sorted_vals_.begin() + k);
}

void KlcRank::sample_proportion(const BinaryLabelSource& labels, Rng& rng) {
    for (auto& v : uniform_x_) v = rng.uniform();
    p_stats_.add(labels.draw(uniform_x_, rng));
    ++t_;
    refresh_width(p_stats_, t_, params_.delta, params_.c, params_.d_over_beta());
}

void KlcRank::sample_point(std::size_t i, const BinaryLabelSource& labels, Rng& rng) {
    auto& p = points_.mutable_point(i);
    p.stats.add(labels.draw(p.location, rng));
    ++t_;
    refresh_width(p.stats, t_, params_.delta, params_.c, params_.d_over_beta());
    dequeue(i);
    enqueue(i);
    record_mean(i);
}

double KlcRank::eliminate(double widest) {
    if (points_.empty_region() || !p_stats_.sampled()) return widest;
    if (!(widest <= proportion_estimate() / 4.0)) return widest;
    const auto doomed = elimination_set(widest);
    if (doomed.empty()) return widest;
    for (auto i : doomed) {
        dequeue(i);
        points_.deactivate(i);
        drop_mean(i);
    }
    return max_width();
}

void KlcRank::refine(double widest) {
    if (!refine_ || points_.empty_region()) return;
    const int level = refinement_level(widest, params_.beta);
    if (level <= refined_level_) return;
    for (auto i : points_.active()) {
        if (points_[i].key.level < level) {
            drop_mean(i);
            dequeue(i);
        }
    }
    for (auto i : points_.refine(level)) enqueue(i);
    refined_level_ = level;
}

void KlcRank::eliminate_and_refine() { refine(eliminate(max_width())); }

std::optional<ScoringOutput> KlcRank::step(const BinaryLabelSource& labels, Rng& rng, std::uint64_t sample_limit) {
    if (finished()) throw std::logic_error("KlcRank::step: active region is empty");
    if (t_ >= sample_limit) return std::nullopt;
    const auto [chosen, widest] = widest_point();
    if (p_stats_.last_width >= widest) {
        do {
            sample_proportion(labels, rng);
        } while (p_stats_.last_width > widest && t_ < sample_limit);
        refine(eliminate(widest));
    } else {
        sample_point(chosen, labels, rng);
        refine(eliminate(max_width()));
    }
    if (finished()) return scoring();
    return std::nullopt;
}

RunRecord run_engine(KlcRank& engine, const PosteriorModel& model, Rng& rng,
                     const std::vector<std::uint64_t>& checkpoints) {
    const auto start = std::chrono::steady_clock::now();
    const BinaryLabelSource labels(model);
    const RocCurve best = optimal_roc(model);
    CheckpointTracker tracker(checkpoints);
    auto regret = [&] { return sup_regret(best, scoring_roc(model, engine.scoring())); };
    tracker.update(engine.time(), regret);

    const std::uint64_t cap = engine.params().max_samples;
    std::optional<ScoringOutput> terminal;
    while (!engine.finished() && engine.time() < cap) {
        terminal = engine.step(labels, rng, cap);
        tracker.update(engine.time(), regret);
    }

    RunRecord rec;
    rec.algorithm = "klcrank";
    rec.tau = engine.time();
    rec.cap_hit = !engine.finished();
    rec.scoring = terminal ? std::move(*terminal) : engine.scoring();
    rec.terminal_regret = sup_regret(best, scoring_roc(model, rec.scoring));
    tracker.finish(rec.terminal_regret);
    rec.checkpoints = tracker.take();
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

RunRecord run_to_completion(const RankParams& params, const PosteriorModel& model, Rng& rng,
                            const std::vector<std::uint64_t>& checkpoints) {
    if (params.dimension != model.dimension()) throw std::invalid_argument("run: model dimension mismatch");
    KlcRank engine(params);
    return run_engine(engine, model, rng, checkpoints);
}

}  // namespace activerank
