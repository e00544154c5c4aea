#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "activerank/kernel_fit.hpp"
#include "activerank/posterior.hpp"
#include "activerank/run_record.hpp"

namespace activerank {

/// Invalid configuration, model file or dataset (CLI exit code 2).
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output (CLI exit code 3).
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::uint64_t> kDefaultCheckpoints = {1'000, 3'000, 10'000, 30'000, 100'000};

struct ExperimentConfig {
    std::string scenario = "rw2";
    // Scenario parameters; missing keys take the scenario defaults (see normalized()).
    nlohmann::json model = nlohmann::json::object();
    std::string algorithm = "klcrank";
    double epsilon = 0.1;
    double delta = 0.1;
    double beta = 1.0;
    double c = 1.0;
    std::size_t K = 100;
    double rho = 0.5;
    std::size_t replicates = 1;
    std::vector<std::uint64_t> checkpoints = kDefaultCheckpoints;
    std::uint64_t master_seed = 0;
    std::uint64_t max_samples = 10'000'000;
    std::filesystem::path output_dir = "out";
    std::size_t workers = 1;

    /// Parses and validates. Throws ConfigError.
    static ExperimentConfig from_json(const nlohmann::json& j);
    /// Every field with defaults filled in. Excludes output_dir and workers, which do not
    /// influence results; this is the object that gets hashed.
    [[nodiscard]] nlohmann::json normalized() const;
    /// FNV-1a 64 of the canonical (sorted-key, compact) dump of normalized(), as 16 hex digits.
    [[nodiscard]] std::string hash() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds the ground-truth model a config describes. Throws ConfigError / IoError.
PosteriorModel build_model(const ExperimentConfig& config);

/// Runs a single replicate with seed split_seed(master_seed, replicate).
RunRecord run_replicate(const ExperimentConfig& config, const PosteriorModel& model, std::size_t replicate);

struct ExperimentResult {
    std::string config_hash;
    std::vector<RunRecord> records;
};

/// Runs every replicate on `workers` threads (ARL_WORKERS overrides config.workers when set)
/// and writes config.json, record_<r>.json, summary.csv and checkpoints.csv to output_dir.
/// Artifacts other than wall-clock timings do not depend on the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// The worker count after applying the ARL_WORKERS override.
std::size_t effective_workers(std::size_t configured);

std::string summary_csv(const std::string& config_hash, const std::vector<RunRecord>& records);
std::string checkpoints_csv(const std::string& config_hash, const std::vector<RunRecord>& records);

/// Expands list-valued `epsilon`, `K` and `algorithm` into one config per combination
/// (K varies only for fixed_grid). Each gets output_dir/<name>.
std::vector<ExperimentConfig> expand_sweep(const nlohmann::json& j);

// Model files: {kind, d, beta, cells: [[lo..., hi..., value], ...], sigma, rho}.
// For the Gaussian kind the cell value is the label mean m(x).
nlohmann::json model_to_json(const PosteriorModel& model);
PosteriorModel model_from_json(const nlohmann::json& j);
PosteriorModel load_model(const std::filesystem::path& path);

/// Reads a `feature,label` (binary) or `feature,value` CSV. Values are binarized as
/// value >= rho, which must then be given. Throws ConfigError on malformed rows.
std::vector<LabeledRow> read_labeled_csv(const std::filesystem::path& path, std::optional<double> rho);

nlohmann::json fit_report(const KernelFit& fit, const std::vector<double>& bandwidths, std::size_t rows);

/// gap,H profile on a grid of about 1000 points: `x,eta,gap,H` (x1..xd columns for d > 1).
/// Points where eta = 1 are written with gap 0 and H inf.
std::string gap_profile_csv(const PosteriorModel& model, double epsilon, bool dkw);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace activerank
