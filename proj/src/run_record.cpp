#include "activerank/run_record.hpp"

#include <algorithm>

namespace activerank {

CheckpointTracker::CheckpointTracker(std::vector<std::uint64_t> budgets) : budgets_(std::move(budgets)) {
    std::sort(budgets_.begin(), budgets_.end());
    budgets_.erase(std::unique(budgets_.begin(), budgets_.end()), budgets_.end());
}

void CheckpointTracker::update(std::uint64_t t, const std::function<double()>& regret) {
    if (next_ >= budgets_.size() || budgets_[next_] > t) return;
    const double r = regret();
    while (next_ < budgets_.size() && budgets_[next_] <= t) recorded_.push_back({budgets_[next_++], r});
}

void CheckpointTracker::finish(double final_regret) {
    while (next_ < budgets_.size()) recorded_.push_back({budgets_[next_++], final_regret});
}

nlohmann::json scoring_to_json(const ScoringOutput& scoring) {
    auto rows = nlohmann::json::array();
    for (const auto& p : scoring.points) {
        auto row = nlohmann::json::array();
        for (double v : p.location) row.push_back(v);
        row.push_back(p.level);
        row.push_back(p.rank);
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json run_record_to_json(const RunRecord& record, const nlohmann::json& config, bool include_timing) {
    nlohmann::json j;
    j["config"] = config;
    j["config_hash"] = record.config_hash;
    j["algorithm"] = record.algorithm;
    j["replicate"] = record.replicate;
    j["seed"] = record.seed;
    j["tau"] = record.tau;
    j["cap_hit"] = record.cap_hit;
    j["terminal_regret"] = record.terminal_regret;
    auto cps = nlohmann::json::array();
    for (const auto& c : record.checkpoints) cps.push_back({c.t, c.regret});
    j["checkpoints"] = std::move(cps);
    j["scoring"] = scoring_to_json(record.scoring);
    if (record.algorithm == "kltcrank") {
        j["variant"] = "dkw";
        j["rho"] = record.rho;
        j["rounds"] = record.rounds;
    }
    if (record.algorithm == "fixed_grid") {
        j["baseline"] = "fixed_grid";
        j["K"] = record.grid_cells;
    }
    if (include_timing) j["wall_ms"] = record.wall_ms;
    return j;
}

}  // namespace activerank
