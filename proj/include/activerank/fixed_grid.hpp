#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "activerank/klcrank.hpp"

namespace activerank {

/// Baseline: the elimination machinery on a frozen K^d uniform grid, no refinement.
KlcRank make_fixed_grid(const RankParams& params, std::size_t cells_per_dim);

RunRecord run_fixed_grid(const RankParams& params, std::size_t cells_per_dim, const PosteriorModel& model, Rng& rng,
                         const std::vector<std::uint64_t>& checkpoints);

}  // namespace activerank
