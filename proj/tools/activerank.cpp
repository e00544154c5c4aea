// activerank: run experiments, inspect problem oracles, and fit posteriors from data.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "activerank/experiment.hpp"
#include "activerank/kernel_fit.hpp"
#include "activerank/posterior.hpp"
#include "activerank/roc.hpp"

namespace fs = std::filesystem;
using namespace activerank;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void print_run(const ExperimentConfig& config, const ExperimentResult& result) {
    std::size_t capped = 0;
    for (const auto& r : result.records) capped += r.cap_hit ? 1 : 0;
    std::printf("%s: %zu replicate(s) of %s on %s, config %s, %zu hit the sample cap\n",
                config.output_dir.string().c_str(), result.records.size(), config.algorithm.c_str(),
                config.scenario.c_str(), result.config_hash.c_str(), capped);
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& output,
            std::optional<std::size_t> workers) {
    ExperimentConfig config = load_config(path);
    if (seed) config.master_seed = *seed;
    if (!output.empty()) config.output_dir = output;
    if (workers) config.workers = *workers;
    print_run(config, run_experiment(config));
    return 0;
}

int cmd_sweep(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::size_t> workers) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
    }
    if (seed) j["master_seed"] = *seed;
    if (workers) j["workers"] = *workers;
    for (const auto& config : expand_sweep(j)) print_run(config, run_experiment(config));
    return 0;
}

int cmd_oracle(const std::string& path, double epsilon, const std::string& output, bool dkw) {
    const PosteriorModel model = load_model(path);
    if (!(epsilon > 0.0)) throw ConfigError("oracle: epsilon must be positive");
    std::error_code ec;
    fs::create_directories(output, ec);
    if (ec) throw IoError("cannot create " + output + ": " + ec.message());
    write_text(fs::path(output) / "gap_profile.csv", gap_profile_csv(model, epsilon, dkw));
    write_text(fs::path(output) / "roc_star.csv", roc_to_csv(optimal_roc(model)));
    const double total = dkw ? total_complexity_dkw(model, epsilon) : total_complexity(model, epsilon);
    std::printf("p = %.12g\ntotal_complexity = %.12g\n", positive_mass(model), total);
    return 0;
}

int cmd_ingest(const std::string& path, std::size_t grid_size, const std::vector<double>& bandwidths,
               std::optional<double> threshold, double beta, const std::string& output, std::string report) {
    const auto rows = read_labeled_csv(path, threshold);
    const KernelFit fit = [&] {
        try {
            return fit_kernel_posterior(rows, grid_size, bandwidths, beta);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("ingest: ") + e.what());
        }
    }();
    write_text(output, model_to_json(fit.model).dump(2) + "\n");
    if (report.empty()) report = fs::path(output).replace_extension(".report.json").string();
    write_text(report, fit_report(fit, bandwidths, rows.size()).dump(2) + "\n");
    std::printf("bandwidth = %.6g over %zu rows; model written to %s\n", fit.bandwidth, rows.size(), output.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active bipartite ranking simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string run_output;
    auto* run = app.add_subcommand("run", "Run the replicates of one experiment config");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--seed", seed, "Override master_seed");
    run->add_option("--output", run_output, "Override output_dir");
    run->add_option("--workers", workers, "Worker threads (ARL_WORKERS takes precedence)");

    std::string sweep_path;
    auto* sweep = app.add_subcommand("sweep", "Cartesian product over epsilon/K/algorithm lists");
    sweep->add_option("config", sweep_path, "Sweep config (JSON)")->required();
    sweep->add_option("--seed", seed, "Override master_seed");
    sweep->add_option("--workers", workers, "Worker threads (ARL_WORKERS takes precedence)");

    std::string model_path;
    double epsilon = 0.1;
    std::string oracle_output = ".";
    bool dkw = false;
    auto* oracle = app.add_subcommand("oracle", "Gap profile, optimal ROC and total complexity of a model");
    oracle->add_option("model", model_path, "Model file (JSON)")->required();
    oracle->add_option("--epsilon", epsilon, "Regret tolerance")->required();
    oracle->add_option("--output", oracle_output, "Output directory");
    oracle->add_flag("--dkw", dkw, "Use the continuous-label complexity");

    std::string csv_path;
    std::size_t grid_size = 100;
    std::vector<double> bandwidths = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3};
    std::optional<double> threshold;
    double beta = 1.0;
    std::string ingest_output = "model.json";
    std::string report_path;
    auto* ingest = app.add_subcommand("ingest", "Fit a tabulated posterior to a feature,label CSV");
    ingest->add_option("csv", csv_path, "Dataset with header feature,label or feature,value")->required();
    ingest->add_option("--grid-size", grid_size, "Cells of the tabulated model");
    ingest->add_option("--bandwidths", bandwidths, "Candidate bandwidths")->delimiter(',');
    ingest->add_option("--threshold", threshold, "Binarize feature,value rows as value >= threshold");
    ingest->add_option("--beta", beta, "Declared smoothness stored in the model");
    ingest->add_option("--output", ingest_output, "Model JSON to write");
    ingest->add_option("--report", report_path, "Fit report JSON (default: <output>.report.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) return cmd_run(config_path, seed, run_output, workers);
        if (*sweep) return cmd_sweep(sweep_path, seed, workers);
        if (*oracle) return cmd_oracle(model_path, epsilon, oracle_output, dkw);
        return cmd_ingest(csv_path, grid_size, bandwidths, threshold, beta, ingest_output, report_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
