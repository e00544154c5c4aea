#include "activerank/fixed_grid.hpp"

#include <stdexcept>

namespace activerank {

KlcRank make_fixed_grid(const RankParams& params, std::size_t cells_per_dim) {
    if (cells_per_dim < 2) throw std::invalid_argument("fixed grid: K must be >= 2");
    return KlcRank(params, PointSet::uniform_grid(params.dimension, cells_per_dim), false);
}

RunRecord run_fixed_grid(const RankParams& params, std::size_t cells_per_dim, const PosteriorModel& model, Rng& rng,
                         const std::vector<std::uint64_t>& checkpoints) {
    if (params.dimension != model.dimension()) throw std::invalid_argument("fixed grid: model dimension mismatch");
    KlcRank engine = make_fixed_grid(params, cells_per_dim);
    RunRecord rec = run_engine(engine, model, rng, checkpoints);
    rec.algorithm = "fixed_grid";
    rec.grid_cells = cells_per_dim;
    return rec;
}

}  // namespace activerank
