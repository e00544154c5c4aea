#include "activerank/kernel_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace activerank {

namespace {

constexpr double kKernelCutoff = 6.0;

double mean_label(const std::vector<LabeledRow>& rows) {
    double s = 0.0;
    for (const auto& r : rows) s += r.label;
    return rows.empty() ? 0.5 : s / static_cast<double>(rows.size());
}

}  // namespace

double nadaraya_watson(const std::vector<LabeledRow>& sorted_rows, double x, double bandwidth, double fallback) {
    const double reach = kKernelCutoff * bandwidth;
    auto first = std::lower_bound(sorted_rows.begin(), sorted_rows.end(), x - reach,
                                  [](const LabeledRow& r, double v) { return r.feature < v; });
    double num = 0.0;
    double den = 0.0;
    const double inv = 1.0 / bandwidth;
    for (auto it = first; it != sorted_rows.end() && it->feature <= x + reach; ++it) {
        const double u = (it->feature - x) * inv;
        const double w = std::exp(-0.5 * u * u);
        num += w * it->label;
        den += w;
    }
    return den > 0.0 ? num / den : fallback;
}

KernelFit fit_kernel_posterior(const std::vector<LabeledRow>& rows, std::size_t grid_size,
                               const std::vector<double>& bandwidths, double beta) {
    if (rows.empty()) throw std::invalid_argument("kernel fit: no rows");
    if (rows.size() < 50) throw std::invalid_argument("kernel fit: at least 50 rows are required");
    if (grid_size == 0) throw std::invalid_argument("kernel fit: grid_size must be positive");
    if (bandwidths.empty()) throw std::invalid_argument("kernel fit: no candidate bandwidths");
    for (double h : bandwidths) {
        if (!(h > 0.0)) throw std::invalid_argument("kernel fit: bandwidths must be positive");
    }
    const auto [lo_it, hi_it] = std::minmax_element(
        rows.begin(), rows.end(), [](const LabeledRow& a, const LabeledRow& b) { return a.feature < b.feature; });
    const double fmin = lo_it->feature;
    const double fmax = hi_it->feature;
    if (!(fmax > fmin)) throw std::invalid_argument("kernel fit: all features are identical");

    // Fold assignment follows input order so the fit is a pure function of the rows.
    std::vector<LabeledRow> scaled(rows.size());
    std::vector<std::size_t> fold(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        scaled[i] = LabeledRow{(rows[i].feature - fmin) / (fmax - fmin), rows[i].label};
        fold[i] = i % kCrossValidationFolds;
    }

    std::vector<std::vector<LabeledRow>> train(kCrossValidationFolds);
    std::vector<std::vector<LabeledRow>> test(kCrossValidationFolds);
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        for (std::size_t f = 0; f < kCrossValidationFolds; ++f) {
            (f == fold[i] ? test[f] : train[f]).push_back(scaled[i]);
        }
    }
    auto by_feature = [](const LabeledRow& a, const LabeledRow& b) { return a.feature < b.feature; };
    for (auto& t : train) std::sort(t.begin(), t.end(), by_feature);

    KernelFit fit{PosteriorModel::constant(0.5), 0.0, {}, fmin, fmax};
    fit.cv_errors.reserve(bandwidths.size());
    double best = std::numeric_limits<double>::infinity();
    for (double h : bandwidths) {
        double sse = 0.0;
        for (std::size_t f = 0; f < kCrossValidationFolds; ++f) {
            const double fallback = mean_label(train[f]);
            for (const auto& r : test[f]) {
                const double e = nadaraya_watson(train[f], r.feature, h, fallback) - r.label;
                sse += e * e;
            }
        }
        const double mse = sse / static_cast<double>(scaled.size());
        fit.cv_errors.push_back(mse);
        if (mse < best) {
            best = mse;
            fit.bandwidth = h;
        }
    }

    std::sort(scaled.begin(), scaled.end(), by_feature);
    const double fallback = mean_label(scaled);
    std::vector<double> values(grid_size);
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double x = (static_cast<double>(k) + 0.5) / static_cast<double>(grid_size);
        values[k] = std::clamp(nadaraya_watson(scaled, x, fit.bandwidth, fallback), kFitClipLow, kFitClipHigh);
    }
    fit.model = PosteriorModel::uniform_steps(values, beta, ModelKind::tabulated);
    return fit;
}

}  // namespace activerank
