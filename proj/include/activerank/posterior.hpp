#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "activerank/geometry.hpp"
#include "activerank/rng.hpp"

namespace activerank {

enum class ModelKind { piecewise_constant, tabulated, analytic, continuous_label_gaussian };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// One constant piece of a posterior. For the Gaussian kind `label_mean` is m(x) on the
/// box and `eta` is P(Y >= rho) there.
struct ModelCell {
    Box box;
    double eta = 0.0;
    double label_mean = 0.0;
};

/// Ground-truth posterior eta on [0,1]^d. Immutable after construction.
class PosteriorModel {
public:
    using EtaFunction = std::function<double(std::span<const double>)>;

    /// Piecewise-constant model over disjoint boxes covering the cube.
    static PosteriorModel piecewise(std::vector<ModelCell> cells, std::size_t d, double beta,
                                    ModelKind kind = ModelKind::piecewise_constant);
    /// d = 1 step function on `values.size()` equal cells.
    static PosteriorModel uniform_steps(const std::vector<double>& values, double beta = 1.0,
                                        ModelKind kind = ModelKind::piecewise_constant);
    static PosteriorModel constant(double value, std::size_t d = 1, double beta = 1.0);
    static PosteriorModel analytic(EtaFunction eta, std::size_t d, double beta);
    /// Y ~ Normal(m(x), sigma^2), m piecewise constant on d = 1 equal cells.
    static PosteriorModel gaussian_label(const std::vector<double>& label_means, double sigma, double rho,
                                         double beta = 1.0);
    static PosteriorModel gaussian_label(std::vector<ModelCell> cells, std::size_t d, double sigma, double rho,
                                         double beta);

    [[nodiscard]] ModelKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return d_; }
    [[nodiscard]] double smoothness() const noexcept { return beta_; }
    [[nodiscard]] double d_over_beta() const noexcept { return static_cast<double>(d_) / beta_; }
    [[nodiscard]] bool is_piecewise() const noexcept { return kind_ != ModelKind::analytic; }
    [[nodiscard]] const std::vector<ModelCell>& cells() const noexcept { return cells_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] double rho() const noexcept { return rho_; }

    [[nodiscard]] double eta(std::span<const double> x) const;
    /// m(x) for the Gaussian kind.
    [[nodiscard]] double label_mean(std::span<const double> x) const;
    /// Integral of eta over `box` (exact for piecewise kinds, adaptive quadrature otherwise).
    [[nodiscard]] double integrate(const Box& box) const;
    [[nodiscard]] double min_eta() const;
    [[nodiscard]] double max_eta() const;

    /// Piecewise approximation on a uniform grid (cell-center values). Piecewise kinds are returned as is.
    [[nodiscard]] PosteriorModel tabulate(std::size_t cells_per_dim) const;

private:
    PosteriorModel() = default;
    [[nodiscard]] const ModelCell& locate(std::span<const double> x) const;
    void validate() const;

    ModelKind kind_ = ModelKind::piecewise_constant;
    std::size_t d_ = 1;
    double beta_ = 1.0;
    std::vector<ModelCell> cells_;
    EtaFunction fn_;
    double sigma_ = 0.0;
    double rho_ = 0.0;
};

/// Standard normal upper tail 1 - Phi(z).
double normal_upper_tail(double z);

/// Y ~ Ber(eta(x)). Throws std::domain_error for x outside the cube.
bool sample_label(const PosteriorModel& model, std::span<const double> x, Rng& rng);
/// Y ~ Normal(m(x), sigma^2). Throws std::invalid_argument for non-Gaussian models.
double sample_continuous_label(const PosteriorModel& model, std::span<const double> x, Rng& rng);

/// p = integral of eta over the cube.
double positive_mass(const PosteriorModel& model);

struct GapProfile {
    std::vector<double> x;
    double eta = 0.0;
    double gap = 0.0;
    double complexity = 0.0;
};

/// Gap Delta(x) and per-point complexity H(x) = Delta^(-d/beta) / kl(eta - Delta, eta + Delta).
/// Throws std::domain_error at points with eta(x) = 1, where the gap is zero.
GapProfile gap(const PosteriorModel& model, std::span<const double> x, double epsilon);
/// Same gap with the continuous-label complexity H(x) = Delta^(-d/beta - 2).
GapProfile gap_dkw(const PosteriorModel& model, std::span<const double> x, double epsilon);

/// Integral of H(x) over the cube, skipping eta = 1 regions.
double total_complexity(const PosteriorModel& model, double epsilon);
double total_complexity_dkw(const PosteriorModel& model, double epsilon);

/// Cells-per-dimension used when gap-type oracles tabulate an analytic model.
std::size_t analytic_tabulation_resolution(std::size_t d);

/// Random-walk step function on `steps` equal cells of [0,1]. Each step keeps the level
/// with probability stay_prob, otherwise adds centered Gaussian noise rejected until the
/// level stays in [0.05, 0.95]. stay_prob = 0.9 gives scenario 1, 0 gives scenario 2.
PosteriorModel generate_random_walk_posterior(std::size_t steps, double stay_prob, double noise_scale,
                                              std::uint64_t seed, double beta = 1.0);

inline constexpr double kWalkLow = 0.05;
inline constexpr double kWalkHigh = 0.95;

}  // namespace activerank
