#pragma once

#include <span>

#include "activerank/posterior.hpp"
#include "activerank/rng.hpp"

namespace activerank {

/// What an algorithm may see of the environment: labels at queried points, nothing else.
class BinaryLabelSource {
public:
    explicit BinaryLabelSource(const PosteriorModel& model) : model_(&model) {}
    [[nodiscard]] std::size_t dimension() const noexcept { return model_->dimension(); }
    bool draw(std::span<const double> x, Rng& rng) const { return sample_label(*model_, x, rng); }

private:
    const PosteriorModel* model_;
};

class ContinuousLabelSource {
public:
    explicit ContinuousLabelSource(const PosteriorModel& model) : model_(&model) {}
    [[nodiscard]] std::size_t dimension() const noexcept { return model_->dimension(); }
    double draw(std::span<const double> x, Rng& rng) const { return sample_continuous_label(*model_, x, rng); }

private:
    const PosteriorModel* model_;
};

}  // namespace activerank
