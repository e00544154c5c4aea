#pragma once

#include <cstddef>
#include <vector>

#include "activerank/posterior.hpp"

namespace activerank {

struct LabeledRow {
    double feature = 0.0;
    double label = 0.0;
};

struct KernelFit {
    PosteriorModel model;
    double bandwidth = 0.0;
    /// Mean squared held-out error per candidate, in input order.
    std::vector<double> cv_errors;
    double feature_min = 0.0;
    double feature_max = 0.0;
};

inline constexpr double kFitClipLow = 0.01;
inline constexpr double kFitClipHigh = 0.99;
inline constexpr std::size_t kCrossValidationFolds = 5;

/// Nadaraya-Watson fit with a Gaussian kernel on min-max rescaled features. The bandwidth is
/// the 5-fold cross-validated squared-error minimizer among `bandwidths`; the estimate is
/// tabulated on `grid_size` equal cells and clipped to [0.01, 0.99].
KernelFit fit_kernel_posterior(const std::vector<LabeledRow>& rows, std::size_t grid_size,
                               const std::vector<double>& bandwidths, double beta = 1.0);

/// Nadaraya-Watson prediction at `x` from rows with features already in [0,1], sorted by feature.
/// Rows farther than 6 bandwidths are skipped. Returns `fallback` when no row carries weight.
double nadaraya_watson(const std::vector<LabeledRow>& sorted_rows, double x, double bandwidth, double fallback);

}  // namespace activerank
