#include "activerank/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "activerank/fixed_grid.hpp"
#include "activerank/klcrank.hpp"
#include "activerank/kltcrank.hpp"
#include "activerank/rng.hpp"

namespace activerank {
namespace {

using nlohmann::json;

const std::set<std::string> kScenarios = {"rw1", "rw2", "two_cell", "constant", "from_csv", "gaussian_label"};
const std::set<std::string> kAlgorithms = {"klcrank", "kltcrank", "fixed_grid"};
const std::set<std::string> kTopLevelKeys = {"scenario", "model",      "algorithm",   "epsilon",     "delta",
                                             "beta",     "c",          "K",           "rho",         "replicates",
                                             "checkpoints", "master_seed", "max_samples", "output_dir", "workers"};

const std::vector<double> kDefaultBandwidths = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3};

template <class T>
T field(const json& j, const char* key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
    }
}

std::uint64_t unsigned_field(const json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    // Budgets like 1e7 arrive as floats.
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(std::string("config: field '") + key + "' must be a non-negative integer");
}

// Scenario parameters with defaults filled in; rejects unknown keys.
json normalized_model(const std::string& scenario, const json& given) {
    if (!given.is_object()) throw ConfigError("config: 'model' must be an object");
    json m;
    if (scenario == "rw1" || scenario == "rw2") {
        m["steps"] = unsigned_field(given, "steps", 100);
        m["stay_prob"] = field<double>(given, "stay_prob", scenario == "rw1" ? 0.9 : 0.0);
        m["noise_scale"] = field<double>(given, "noise_scale", 0.05);
        m["seed"] = unsigned_field(given, "seed", 1);
    } else if (scenario == "two_cell") {
        m["values"] = field<std::vector<double>>(given, "values", {0.8, 0.2});
    } else if (scenario == "constant") {
        m["value"] = field<double>(given, "value", 0.5);
        m["d"] = unsigned_field(given, "d", 1);
    } else if (scenario == "from_csv") {
        if (!given.contains("csv")) throw ConfigError("config: from_csv needs model.csv");
        m["csv"] = field<std::string>(given, "csv", "");
        m["grid_size"] = unsigned_field(given, "grid_size", 100);
        m["bandwidths"] = field<std::vector<double>>(given, "bandwidths", kDefaultBandwidths);
        if (given.contains("threshold")) m["threshold"] = field<double>(given, "threshold", 0.0);
    } else if (scenario == "gaussian_label") {
        m["means"] = field<std::vector<double>>(given, "means", {1.0, 0.0});
        m["sigma"] = field<double>(given, "sigma", 1.0);
    }
    for (const auto& [key, value] : given.items()) {
        if (!m.contains(key)) throw ConfigError("config: unknown model field '" + key + "' for scenario " + scenario);
    }
    return m;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

RankParams rank_params(const ExperimentConfig& config, std::size_t dimension) {
    RankParams p;
    p.epsilon = config.epsilon;
    p.delta = config.delta;
    p.beta = config.beta;
    p.c = config.c;
    p.dimension = dimension;
    p.max_samples = config.max_samples;
    return p;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!kTopLevelKeys.count(key)) throw ConfigError("config: unknown field '" + key + "'");
    }
    ExperimentConfig c;
    c.scenario = field<std::string>(j, "scenario", c.scenario);
    if (!kScenarios.count(c.scenario)) throw ConfigError("config: unknown scenario '" + c.scenario + "'");
    c.algorithm = field<std::string>(j, "algorithm", c.algorithm);
    if (!kAlgorithms.count(c.algorithm)) throw ConfigError("config: unknown algorithm '" + c.algorithm + "'");
    c.model = normalized_model(c.scenario, j.value("model", json::object()));
    c.epsilon = field<double>(j, "epsilon", c.epsilon);
    c.delta = field<double>(j, "delta", c.delta);
    c.beta = field<double>(j, "beta", c.beta);
    c.c = field<double>(j, "c", c.c);
    c.K = unsigned_field(j, "K", c.K);
    c.rho = field<double>(j, "rho", c.rho);
    c.replicates = unsigned_field(j, "replicates", c.replicates);
    c.master_seed = unsigned_field(j, "master_seed", c.master_seed);
    c.max_samples = unsigned_field(j, "max_samples", c.max_samples);
    c.workers = unsigned_field(j, "workers", c.workers);
    c.output_dir = field<std::string>(j, "output_dir", c.output_dir.string());
    if (j.contains("checkpoints")) {
        const auto& cps = j.at("checkpoints");
        if (!cps.is_array()) throw ConfigError("config: 'checkpoints' must be a list");
        c.checkpoints.clear();
        for (const auto& v : cps) c.checkpoints.push_back(unsigned_field(json{{"t", v}}, "t", 0));
    }

    if (c.replicates < 1) throw ConfigError("config: replicates must be >= 1");
    if (c.workers < 1) throw ConfigError("config: workers must be >= 1");
    if (c.max_samples < 1) throw ConfigError("config: max_samples must be >= 1");
    if (c.algorithm == "fixed_grid" && c.K < 2) throw ConfigError("config: K must be >= 2");
    if (c.algorithm == "kltcrank" && c.scenario != "gaussian_label") {
        throw ConfigError("config: kltcrank needs the gaussian_label scenario");
    }
    if (c.algorithm != "kltcrank" && c.scenario == "gaussian_label") {
        throw ConfigError("config: the gaussian_label scenario is for kltcrank");
    }
    try {
        rank_params(c, 1).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

json ExperimentConfig::normalized() const {
    json j;
    j["scenario"] = scenario;
    j["model"] = model;
    j["algorithm"] = algorithm;
    j["epsilon"] = epsilon;
    j["delta"] = delta;
    j["beta"] = beta;
    j["c"] = c;
    if (algorithm == "fixed_grid") j["K"] = K;
    if (scenario == "gaussian_label") j["rho"] = rho;
    j["replicates"] = replicates;
    j["checkpoints"] = checkpoints;
    j["master_seed"] = master_seed;
    j["max_samples"] = max_samples;
    return j;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(normalized().dump()); }

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: invalid JSON in " + path.string() + ": " + e.what());
    }
    return ExperimentConfig::from_json(j);
}

PosteriorModel build_model(const ExperimentConfig& config) {
    const json& m = config.model;
    try {
        if (config.scenario == "rw1" || config.scenario == "rw2") {
            return generate_random_walk_posterior(m.at("steps").get<std::size_t>(), m.at("stay_prob").get<double>(),
                                                  m.at("noise_scale").get<double>(),
                                                  m.at("seed").get<std::uint64_t>(), config.beta);
        }
        if (config.scenario == "two_cell") {
            return PosteriorModel::uniform_steps(m.at("values").get<std::vector<double>>(), config.beta);
        }
        if (config.scenario == "constant") {
            return PosteriorModel::constant(m.at("value").get<double>(), m.at("d").get<std::size_t>(), config.beta);
        }
        if (config.scenario == "gaussian_label") {
            return PosteriorModel::gaussian_label(m.at("means").get<std::vector<double>>(), m.at("sigma").get<double>(),
                                                  config.rho, config.beta);
        }
        // from_csv
        std::optional<double> threshold;
        if (m.contains("threshold")) threshold = m.at("threshold").get<double>();
        const auto rows = read_labeled_csv(m.at("csv").get<std::string>(), threshold);
        return fit_kernel_posterior(rows, m.at("grid_size").get<std::size_t>(),
                                    m.at("bandwidths").get<std::vector<double>>(), config.beta)
            .model;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

RunRecord run_replicate(const ExperimentConfig& config, const PosteriorModel& model, std::size_t replicate) {
    const std::uint64_t seed = split_seed(config.master_seed, replicate);
    Rng rng(seed);
    const RankParams params = rank_params(config, model.dimension());
    RunRecord rec;
    if (config.algorithm == "klcrank") {
        rec = run_to_completion(params, model, rng, config.checkpoints);
    } else if (config.algorithm == "fixed_grid") {
        rec = run_fixed_grid(params, config.K, model, rng, config.checkpoints);
    } else {
        rec = run_kltcrank(params, config.rho, model, rng, config.checkpoints);
    }
    rec.replicate = replicate;
    rec.seed = seed;
    rec.config_hash = config.hash();
    return rec;
}

std::size_t effective_workers(std::size_t configured) {
    if (const char* env = std::getenv("ARL_WORKERS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || v == 0) throw ConfigError("ARL_WORKERS must be a positive integer");
        return static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(configured, 1);
}

std::string summary_csv(const std::string& config_hash, const std::vector<RunRecord>& records) {
    std::string out = "# config_hash: " + config_hash + "\nreplicate,seed,tau,terminal_regret,cap_hit\n";
    for (const auto& r : records) {
        out += std::to_string(r.replicate) + "," + std::to_string(r.seed) + "," + std::to_string(r.tau) + "," +
               fmt_double(r.terminal_regret) + "," + (r.cap_hit ? "1" : "0") + "\n";
    }
    return out;
}

std::string checkpoints_csv(const std::string& config_hash, const std::vector<RunRecord>& records) {
    std::string out = "# config_hash: " + config_hash + "\nreplicate,t,regret\n";
    for (const auto& r : records) {
        for (const auto& c : r.checkpoints) {
            out += std::to_string(r.replicate) + "," + std::to_string(c.t) + "," + fmt_double(c.regret) + "\n";
        }
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const PosteriorModel model = build_model(config);
    const std::string hash = config.hash();
    const json normalized = config.normalized();
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create " + config.output_dir.string() + ": " + ec.message());
    json config_doc = normalized;
    config_doc["config_hash"] = hash;
    write_text(config.output_dir / "config.json", config_doc.dump(2) + "\n");

    const std::size_t n = config.replicates;
    const std::size_t workers = std::min(effective_workers(config.workers), n);
    std::vector<std::optional<RunRecord>> slots(n);
    std::exception_ptr failure;
    std::mutex mu;
    std::condition_variable ready;
    std::atomic<std::size_t> next_job{0};

    auto work = [&] {
        for (;;) {
            const std::size_t r = next_job.fetch_add(1);
            if (r >= n) return;
            try {
                RunRecord rec = run_replicate(config, model, r);
                std::lock_guard lock(mu);
                slots[r] = std::move(rec);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next_job.store(n);
            }
            ready.notify_all();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);

    // Single collector: record files are written in replicate order as results arrive.
    ExperimentResult result;
    result.config_hash = hash;
    std::exception_ptr write_failure;
    for (std::size_t r = 0; r < n; ++r) {
        std::unique_lock lock(mu);
        ready.wait(lock, [&] { return slots[r].has_value() || failure; });
        if (!slots[r]) break;
        RunRecord rec = std::move(*slots[r]);
        slots[r].reset();
        lock.unlock();
        try {
            write_text(config.output_dir / ("record_" + std::to_string(r) + ".json"),
                       run_record_to_json(rec, normalized).dump() + "\n");
        } catch (...) {
            write_failure = std::current_exception();
            next_job.store(n);
            break;
        }
        result.records.push_back(std::move(rec));
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    if (write_failure) std::rethrow_exception(write_failure);

    write_text(config.output_dir / "summary.csv", summary_csv(hash, result.records));
    write_text(config.output_dir / "checkpoints.csv", checkpoints_csv(hash, result.records));
    return result;
}

std::vector<ExperimentConfig> expand_sweep(const json& j) {
    if (!j.is_object()) throw ConfigError("sweep: top level must be an object");
    auto as_list = [&](const char* key, const json& fallback) {
        const json v = j.value(key, fallback);
        return v.is_array() ? v : json::array({v});
    };
    const json eps_list = as_list("epsilon", 0.1);
    const json k_list = as_list("K", 100);
    const json algo_list = as_list("algorithm", "klcrank");
    if (eps_list.empty() || k_list.empty() || algo_list.empty()) throw ConfigError("sweep: empty list");
    const std::filesystem::path root = field<std::string>(j, "output_dir", "out");

    std::vector<ExperimentConfig> out;
    for (const auto& algo : algo_list) {
        for (const auto& eps : eps_list) {
            const bool grid = algo.is_string() && algo.get<std::string>() == "fixed_grid";
            const json ks = grid ? k_list : json::array({k_list.front()});
            for (const auto& k : ks) {
                json one = j;
                one["algorithm"] = algo;
                one["epsilon"] = eps;
                one["K"] = k;
                ExperimentConfig c = ExperimentConfig::from_json(one);
                char name[96];
                std::snprintf(name, sizeof name, "%s_eps%g", c.algorithm.c_str(), c.epsilon);
                std::string dir = name;
                if (grid) dir += "_K" + std::to_string(c.K);
                c.output_dir = root / dir;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

json model_to_json(const PosteriorModel& model) {
    if (model.kind() == ModelKind::analytic) throw ConfigError("model: analytic models cannot be serialized");
    json j;
    j["kind"] = to_string(model.kind());
    j["d"] = model.dimension();
    j["beta"] = model.smoothness();
    const bool gaussian = model.kind() == ModelKind::continuous_label_gaussian;
    auto cells = json::array();
    for (const auto& c : model.cells()) {
        auto row = json::array();
        for (double v : c.box.lo) row.push_back(v);
        for (double v : c.box.hi) row.push_back(v);
        row.push_back(gaussian ? c.label_mean : c.eta);
        cells.push_back(std::move(row));
    }
    j["cells"] = std::move(cells);
    if (gaussian) {
        j["sigma"] = model.sigma();
        j["rho"] = model.rho();
    }
    return j;
}

PosteriorModel model_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ConfigError("model: top level must be an object");
        const ModelKind kind = model_kind_from_string(j.at("kind").get<std::string>());
        if (kind == ModelKind::analytic) throw ConfigError("model: analytic models cannot be loaded from JSON");
        const auto d = j.value("d", std::size_t{1});
        const double beta = j.value("beta", 1.0);
        if (d < 1 || d > 3) throw ConfigError("model: d must be in 1..3");
        std::vector<ModelCell> cells;
        for (const auto& row : j.at("cells")) {
            if (!row.is_array() || row.size() != 2 * d + 1) throw ConfigError("model: each cell is [lo..., hi..., value]");
            ModelCell cell;
            for (std::size_t k = 0; k < d; ++k) {
                cell.box.lo.push_back(row[k].get<double>());
                cell.box.hi.push_back(row[d + k].get<double>());
            }
            const double v = row[2 * d].get<double>();
            cell.eta = v;
            cell.label_mean = v;
            cells.push_back(std::move(cell));
        }
        if (kind == ModelKind::continuous_label_gaussian) {
            return PosteriorModel::gaussian_label(std::move(cells), d, j.at("sigma").get<double>(),
                                                  j.at("rho").get<double>(), beta);
        }
        return PosteriorModel::piecewise(std::move(cells), d, beta, kind);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

PosteriorModel load_model(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("model: invalid JSON in " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

std::vector<LabeledRow> read_labeled_csv(const std::filesystem::path& path, std::optional<double> rho) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv: empty file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Tolerate a UTF-8 byte-order mark.
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    bool binary = true;
    if (line == "feature,label") {
        binary = true;
    } else if (line == "feature,value") {
        binary = false;
        if (!rho) throw ConfigError("csv: feature,value data needs a threshold to binarize labels");
    } else {
        throw ConfigError("csv: header must be 'feature,label' or 'feature,value'");
    }

    auto parse = [&](const std::string& s, std::size_t line_no) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0' || !std::isfinite(v)) {
            throw ConfigError("csv: malformed number '" + s + "' on line " + std::to_string(line_no));
        }
        return v;
    };

    std::vector<LabeledRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ConfigError("csv: expected two columns on line " + std::to_string(line_no));
        }
        LabeledRow row;
        row.feature = parse(line.substr(0, comma), line_no);
        const double v = parse(line.substr(comma + 1), line_no);
        if (binary) {
            if (v != 0.0 && v != 1.0) throw ConfigError("csv: label must be 0 or 1 on line " + std::to_string(line_no));
            row.label = v;
        } else {
            row.label = v >= *rho ? 1.0 : 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

json fit_report(const KernelFit& fit, const std::vector<double>& bandwidths, std::size_t rows) {
    json j;
    j["rows"] = rows;
    j["bandwidth"] = fit.bandwidth;
    j["feature_min"] = fit.feature_min;
    j["feature_max"] = fit.feature_max;
    j["grid_size"] = fit.model.cells().size();
    auto cv = json::array();
    for (std::size_t k = 0; k < bandwidths.size(); ++k) cv.push_back({{"bandwidth", bandwidths[k]}, {"cv_error", fit.cv_errors[k]}});
    j["cross_validation"] = std::move(cv);
    const auto best = std::min_element(fit.cv_errors.begin(), fit.cv_errors.end());
    j["cv_error"] = best == fit.cv_errors.end() ? 0.0 : *best;
    return j;
}

std::string gap_profile_csv(const PosteriorModel& model, double epsilon, bool dkw) {
    const std::size_t d = model.dimension();
    const std::size_t per_dim = d == 1 ? 1000 : d == 2 ? 32 : 10;
    std::string out;
    if (d == 1) {
        out = "x";
    } else {
        for (std::size_t k = 0; k < d; ++k) out += (k ? ",x" : "x") + std::to_string(k + 1);
    }
    out += ",eta,gap,H\n";
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) total *= per_dim;
    std::vector<double> x(d);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (std::size_t k = d; k-- > 0;) {
            x[k] = (static_cast<double>(rest % per_dim) + 0.5) / static_cast<double>(per_dim);
            rest /= per_dim;
        }
        for (std::size_t k = 0; k < d; ++k) out += (k ? "," : "") + fmt_double(x[k]);
        const double e = model.eta(x);
        if (e >= 1.0) {
            out += "," + fmt_double(e) + ",0,inf\n";
            continue;
        }
        const GapProfile g = dkw ? gap_dkw(model, x, epsilon) : gap(model, x, epsilon);
        out += "," + fmt_double(g.eta) + "," + fmt_double(g.gap) + "," + fmt_double(g.complexity) + "\n";
    }
    return out;
}

}  // namespace activerank
