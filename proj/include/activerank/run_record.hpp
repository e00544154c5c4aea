#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "activerank/roc.hpp"

namespace activerank {

struct Checkpoint {
    std::uint64_t t = 0;
    double regret = 0.0;
};

/// One algorithm execution. Regrets are computed oracle-side against the true model.
struct RunRecord {
    std::string algorithm;
    std::string config_hash;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    std::uint64_t tau = 0;     // labels drawn, including the global-proportion channel
    std::uint64_t rounds = 0;  // round-based variant only
    bool cap_hit = false;
    std::vector<Checkpoint> checkpoints;
    double terminal_regret = 0.0;
    ScoringOutput scoring;
    double wall_ms = 0.0;
    std::size_t grid_cells = 0;  // fixed-grid baseline only
    double rho = 0.0;            // round-based variant only
};

/// Records regret the first time the sample count reaches each budget.
class CheckpointTracker {
public:
    explicit CheckpointTracker(std::vector<std::uint64_t> budgets);

    /// Calls `regret()` for every budget <= t not yet recorded.
    void update(std::uint64_t t, const std::function<double()>& regret);
    /// Fills the remaining budgets with the final regret of a finished run.
    void finish(double final_regret);
    [[nodiscard]] const std::vector<Checkpoint>& recorded() const noexcept { return recorded_; }
    [[nodiscard]] std::vector<Checkpoint> take() { return std::move(recorded_); }

private:
    std::vector<std::uint64_t> budgets_;
    std::size_t next_ = 0;
    std::vector<Checkpoint> recorded_;
};

nlohmann::json scoring_to_json(const ScoringOutput& scoring);
/// RunRecord JSON. `config` is embedded verbatim; `include_timing` controls wall_ms.
nlohmann::json run_record_to_json(const RunRecord& record, const nlohmann::json& config, bool include_timing = true);

}  // namespace activerank
