#include "activerank/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "activerank/kl_confidence.hpp"

namespace activerank {

namespace {

constexpr double kQuadratureTolerance = 1e-8;

double integrate_box(const PosteriorModel::EtaFunction& f, const Box& box) {
    using boost::math::quadrature::gauss_kronrod;
    const std::size_t d = box.dimension();
    std::vector<double> x(d);
    std::function<double(std::size_t)> nested = [&](std::size_t k) -> double {
        if (box.hi[k] <= box.lo[k]) return 0.0;
        auto inner = [&](double v) {
            x[k] = v;
            return k + 1 == d ? f(x) : nested(k + 1);
        };
        return gauss_kronrod<double, 15>::integrate(inner, box.lo[k], box.hi[k], 12, kQuadratureTolerance);
    };
    return nested(0);
}

// Distinct posterior levels with the total volume carrying each.
std::vector<std::pair<double, double>> level_masses(const PosteriorModel& model) {
    std::vector<std::pair<double, double>> levels;
    levels.reserve(model.cells().size());
    for (const auto& c : model.cells()) levels.emplace_back(c.eta, c.box.volume());
    std::sort(levels.begin(), levels.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& [v, w] : levels) {
        if (!merged.empty() && merged.back().first == v) {
            merged.back().second += w;
        } else {
            merged.emplace_back(v, w);
        }
    }
    return merged;
}

// Smallest z > 0 with z * L(z) >= threshold, where L(z) is the volume of {y : |eta(y) - e| <= z}.
// L is a right-continuous step function with jumps at |level - e|, so on each constancy
// interval [z_j, z_{j+1}) the candidate is threshold / L_j.
double scan_gap(const std::vector<std::pair<double, double>>& levels, double e, double threshold) {
    std::vector<std::pair<double, double>> jumps;
    jumps.reserve(levels.size());
    for (const auto& [v, w] : levels) jumps.emplace_back(std::abs(v - e), w);
    std::sort(jumps.begin(), jumps.end());
    double mass = 0.0;
    for (std::size_t j = 0; j < jumps.size(); ++j) {
        mass += jumps[j].second;
        if (j + 1 < jumps.size() && jumps[j + 1].first == jumps[j].first) continue;
        const double next = j + 1 < jumps.size() ? jumps[j + 1].first : std::numeric_limits<double>::infinity();
        if (mass <= 0.0) continue;
        const double candidate = std::max(jumps[j].first, threshold / mass);
        if (candidate < next) return candidate > 0.0 ? candidate : std::numeric_limits<double>::min();
    }
    return std::numeric_limits<double>::infinity();
}

double kl_complexity(double eta, double gap, double d_over_beta) {
    const double lower = std::max(0.0, eta - gap);
    const double upper = std::min(1.0, eta + gap);
    const double kl = bernoulli_kl(lower, upper);
    return std::pow(gap, -d_over_beta) / kl;
}

double dkw_complexity(double, double gap, double d_over_beta) { return std::pow(gap, -d_over_beta - 2.0); }

template <class Complexity>
GapProfile gap_impl(const PosteriorModel& model, std::span<const double> x, double epsilon, Complexity complexity) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("gap: epsilon must be positive");
    if (!in_unit_cube(x) || x.size() != model.dimension()) throw std::domain_error("gap: x outside [0,1]^d");
    const double e = model.eta(x);
    if (e >= 1.0) throw std::domain_error("gap: eta(x) = 1 gives a degenerate zero gap");
    GapProfile out;
    out.x.assign(x.begin(), x.end());
    out.eta = e;
    if (model.is_piecewise()) {
        const double p = positive_mass(model);
        out.gap = std::min(scan_gap(level_masses(model), e, epsilon * p * (1.0 - e)), 1.0 - e);
    } else {
        const auto table = model.tabulate(analytic_tabulation_resolution(model.dimension()));
        const double p = positive_mass(model);
        out.gap = std::min(scan_gap(level_masses(table), e, epsilon * p * (1.0 - e)), 1.0 - e);
    }
    out.complexity = complexity(e, out.gap, model.d_over_beta());
    return out;
}

template <class Complexity>
double total_impl(const PosteriorModel& model, double epsilon, Complexity complexity) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("total_complexity: epsilon must be positive");
    const PosteriorModel table =
        model.is_piecewise() ? model : model.tabulate(analytic_tabulation_resolution(model.dimension()));
    const double p = positive_mass(model);
    const auto levels = level_masses(table);
    double total = 0.0;
    for (const auto& [e, w] : levels) {
        if (e >= 1.0) continue;
        const double g = std::min(scan_gap(levels, e, epsilon * p * (1.0 - e)), 1.0 - e);
        total += w * complexity(e, g, table.d_over_beta());
    }
    return total;
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::piecewise_constant: return "piecewise_constant";
        case ModelKind::tabulated: return "tabulated";
        case ModelKind::analytic: return "analytic_callable";
        case ModelKind::continuous_label_gaussian: return "continuous_label_gaussian";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "piecewise_constant") return ModelKind::piecewise_constant;
    if (name == "tabulated") return ModelKind::tabulated;
    if (name == "analytic_callable") return ModelKind::analytic;
    if (name == "continuous_label_gaussian") return ModelKind::continuous_label_gaussian;
    throw std::invalid_argument("unknown model kind: " + name);
}

PosteriorModel PosteriorModel::piecewise(std::vector<ModelCell> cells, std::size_t d, double beta, ModelKind kind) {
    if (kind == ModelKind::analytic) throw std::invalid_argument("piecewise: analytic kind needs a callable");
    PosteriorModel m;
    m.kind_ = kind;
    m.d_ = d;
    m.beta_ = beta;
    m.cells_ = std::move(cells);
    if (d == 1) {
        std::sort(m.cells_.begin(), m.cells_.end(),
                  [](const ModelCell& a, const ModelCell& b) { return a.box.lo[0] < b.box.lo[0]; });
    }
    m.validate();
    return m;
}

PosteriorModel PosteriorModel::uniform_steps(const std::vector<double>& values, double beta, ModelKind kind) {
    if (values.empty()) throw std::invalid_argument("uniform_steps: no values");
    std::vector<ModelCell> cells;
    const double n = static_cast<double>(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double lo = static_cast<double>(k) / n;
        const double hi = k + 1 == values.size() ? 1.0 : static_cast<double>(k + 1) / n;
        cells.push_back(ModelCell{Box{{lo}, {hi}}, values[k], 0.0});
    }
    return piecewise(std::move(cells), 1, beta, kind);
}

PosteriorModel PosteriorModel::constant(double value, std::size_t d, double beta) {
    return piecewise({ModelCell{Box::unit(d), value, 0.0}}, d, beta);
}

PosteriorModel PosteriorModel::analytic(EtaFunction eta, std::size_t d, double beta) {
    if (!eta) throw std::invalid_argument("analytic: empty callable");
    PosteriorModel m;
    m.kind_ = ModelKind::analytic;
    m.d_ = d;
    m.beta_ = beta;
    m.fn_ = std::move(eta);
    m.validate();
    return m;
}

PosteriorModel PosteriorModel::gaussian_label(const std::vector<double>& label_means, double sigma, double rho,
                                              double beta) {
    std::vector<ModelCell> cells;
    const double n = static_cast<double>(label_means.size());
    for (std::size_t k = 0; k < label_means.size(); ++k) {
        const double lo = static_cast<double>(k) / n;
        const double hi = k + 1 == label_means.size() ? 1.0 : static_cast<double>(k + 1) / n;
        cells.push_back(ModelCell{Box{{lo}, {hi}}, 0.0, label_means[k]});
    }
    return gaussian_label(std::move(cells), 1, sigma, rho, beta);
}

PosteriorModel PosteriorModel::gaussian_label(std::vector<ModelCell> cells, std::size_t d, double sigma, double rho,
                                              double beta) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_label: sigma must be positive");
    for (auto& c : cells) c.eta = normal_upper_tail((rho - c.label_mean) / sigma);
    PosteriorModel m = piecewise(std::move(cells), d, beta, ModelKind::continuous_label_gaussian);
    m.sigma_ = sigma;
    m.rho_ = rho;
    return m;
}

void PosteriorModel::validate() const {
    if (d_ == 0) throw std::invalid_argument("posterior: dimension must be >= 1");
    if (!(beta_ > 0.0)) throw std::invalid_argument("posterior: smoothness must be positive");
    if (kind_ == ModelKind::analytic) return;
    if (cells_.empty()) throw std::invalid_argument("posterior: no cells");
    double total = 0.0;
    for (const auto& c : cells_) {
        if (c.box.dimension() != d_) throw std::invalid_argument("posterior: cell dimension mismatch");
        for (std::size_t k = 0; k < d_; ++k) {
            if (c.box.lo[k] < 0.0 || c.box.hi[k] > 1.0 || !(c.box.lo[k] < c.box.hi[k])) {
                throw std::invalid_argument("posterior: cell outside [0,1]^d or empty");
            }
        }
        if (!(c.eta >= 0.0 && c.eta <= 1.0)) throw std::invalid_argument("posterior: cell value outside [0,1]");
        total += c.box.volume();
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("posterior: cell volumes do not sum to 1");
    if (d_ == 1) {
        for (std::size_t k = 1; k < cells_.size(); ++k) {
            if (std::abs(cells_[k].box.lo[0] - cells_[k - 1].box.hi[0]) > 1e-12) {
                throw std::invalid_argument("posterior: cells are not contiguous");
            }
        }
    }
}

const ModelCell& PosteriorModel::locate(std::span<const double> x) const {
    if (d_ == 1) {
        auto it = std::upper_bound(cells_.begin(), cells_.end(), x[0],
                                   [](double v, const ModelCell& c) { return v < c.box.lo[0]; });
        if (it == cells_.begin()) throw std::domain_error("posterior: x outside the model support");
        return *std::prev(it);
    }
    for (const auto& c : cells_) {
        if (c.box.contains(x)) return c;
    }
    throw std::domain_error("posterior: x outside the model support");
}

double PosteriorModel::eta(std::span<const double> x) const {
    if (x.size() != d_ || !in_unit_cube(x)) throw std::domain_error("posterior: x outside [0,1]^d");
    if (kind_ == ModelKind::analytic) return std::clamp(fn_(x), 0.0, 1.0);
    return locate(x).eta;
}

double PosteriorModel::label_mean(std::span<const double> x) const {
    if (kind_ != ModelKind::continuous_label_gaussian) {
        throw std::invalid_argument("label_mean: model does not carry continuous labels");
    }
    if (x.size() != d_ || !in_unit_cube(x)) throw std::domain_error("posterior: x outside [0,1]^d");
    return locate(x).label_mean;
}

double PosteriorModel::integrate(const Box& box) const {
    if (kind_ == ModelKind::analytic) {
        return integrate_box([this](std::span<const double> x) { return std::clamp(fn_(x), 0.0, 1.0); }, box);
    }
    double total = 0.0;
    if (d_ == 1) {
        auto it = std::upper_bound(cells_.begin(), cells_.end(), box.lo[0],
                                   [](double v, const ModelCell& c) { return v < c.box.lo[0]; });
        if (it != cells_.begin()) --it;
        for (; it != cells_.end() && it->box.lo[0] < box.hi[0]; ++it) total += it->eta * overlap_volume(it->box, box);
        return total;
    }
    for (const auto& c : cells_) total += c.eta * overlap_volume(c.box, box);
    return total;
}

double PosteriorModel::min_eta() const {
    if (kind_ == ModelKind::analytic) return tabulate(analytic_tabulation_resolution(d_)).min_eta();
    return std::min_element(cells_.begin(), cells_.end(),
                            [](const ModelCell& a, const ModelCell& b) { return a.eta < b.eta; })
        ->eta;
}

double PosteriorModel::max_eta() const {
    if (kind_ == ModelKind::analytic) return tabulate(analytic_tabulation_resolution(d_)).max_eta();
    return std::max_element(cells_.begin(), cells_.end(),
                            [](const ModelCell& a, const ModelCell& b) { return a.eta < b.eta; })
        ->eta;
}

PosteriorModel PosteriorModel::tabulate(std::size_t cells_per_dim) const {
    if (kind_ != ModelKind::analytic) return *this;
    const double side = 1.0 / static_cast<double>(cells_per_dim);
    std::size_t total = 1;
    for (std::size_t k = 0; k < d_; ++k) total *= cells_per_dim;
    std::vector<ModelCell> cells;
    cells.reserve(total);
    std::vector<std::size_t> idx(d_, 0);
    for (std::size_t n = 0; n < total; ++n) {
        std::size_t rem = n;
        Box box{std::vector<double>(d_), std::vector<double>(d_)};
        for (std::size_t k = 0; k < d_; ++k) {
            idx[k] = rem % cells_per_dim;
            rem /= cells_per_dim;
            box.lo[k] = static_cast<double>(idx[k]) * side;
            box.hi[k] = idx[k] + 1 == cells_per_dim ? 1.0 : static_cast<double>(idx[k] + 1) * side;
        }
        const auto c = box.center();
        cells.push_back(ModelCell{std::move(box), std::clamp(fn_(c), 0.0, 1.0), 0.0});
    }
    // Floating-point side lengths may miss a total volume of exactly one by a few ulps.
    PosteriorModel m;
    m.kind_ = ModelKind::tabulated;
    m.d_ = d_;
    m.beta_ = beta_;
    m.cells_ = std::move(cells);
    return m;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

bool sample_label(const PosteriorModel& model, std::span<const double> x, Rng& rng) {
    return rng.bernoulli(model.eta(x));
}

double sample_continuous_label(const PosteriorModel& model, std::span<const double> x, Rng& rng) {
    return rng.normal(model.label_mean(x), model.sigma());
}

double positive_mass(const PosteriorModel& model) {
    if (model.is_piecewise()) {
        double p = 0.0;
        for (const auto& c : model.cells()) p += c.eta * c.box.volume();
        return p;
    }
    return model.integrate(Box::unit(model.dimension()));
}

GapProfile gap(const PosteriorModel& model, std::span<const double> x, double epsilon) {
    return gap_impl(model, x, epsilon, kl_complexity);
}

GapProfile gap_dkw(const PosteriorModel& model, std::span<const double> x, double epsilon) {
    return gap_impl(model, x, epsilon, dkw_complexity);
}

double total_complexity(const PosteriorModel& model, double epsilon) {
    return total_impl(model, epsilon, kl_complexity);
}

double total_complexity_dkw(const PosteriorModel& model, double epsilon) {
    return total_impl(model, epsilon, dkw_complexity);
}

std::size_t analytic_tabulation_resolution(std::size_t d) {
    switch (d) {
        case 1: return 1u << 14;
        case 2: return 256;
        default: return 32;
    }
}

PosteriorModel generate_random_walk_posterior(std::size_t steps, double stay_prob, double noise_scale,
                                              std::uint64_t seed, double beta) {
    if (steps < 2) throw std::invalid_argument("random walk: steps must be >= 2");
    if (!(stay_prob >= 0.0 && stay_prob <= 1.0)) throw std::invalid_argument("random walk: stay_prob outside [0,1]");
    if (!(noise_scale > 0.0)) throw std::invalid_argument("random walk: noise_scale must be positive");
    Rng rng(seed);
    std::vector<double> values(steps);
    double level = 0.5;
    values[0] = level;
    for (std::size_t k = 1; k < steps; ++k) {
        if (!rng.bernoulli(stay_prob)) {
            double next = 0.0;
            do {
                next = level + rng.normal(0.0, noise_scale);
            } while (next < kWalkLow || next > kWalkHigh);
            level = next;
        }
        values[k] = level;
    }
    return PosteriorModel::uniform_steps(values, beta);
}

}  // namespace activerank
