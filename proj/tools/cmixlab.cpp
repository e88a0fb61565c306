// cmixlab: config-driven experiments around the Bernstein-type tail bound for
// geometrically C-mixing samples and Gaussian-kernel regularized learners.
//
// Subcommands: simulate | mixing | bound | validate | rates | forecast.
// Every command reads a single JSON config, writes CSV (17 significant
// digits, fixed column order) and is deterministic given (config, seed);
// the only nondeterministic output line is the timestamp comment, which
// --no-timestamp suppresses.
//
// Exit codes: 0 success, 1 internal/numerical failure, 2 invalid config.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cmix/concentration.hpp"
#include "cmix/csv.hpp"
#include "cmix/errors.hpp"
#include "cmix/experiments.hpp"
#include "cmix/forecasting.hpp"
#include "cmix/learners.hpp"
#include "cmix/losses.hpp"
#include "cmix/processes.hpp"
#include "cmix/worker_pool.hpp"

using nlohmann::json;
using namespace cmix;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = 0;
    bool has_seed_override = false;
    unsigned workers = 0;
    bool no_timestamp = false;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file: " + path);
    json config;
    try {
        config = json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError("config parse error: " + std::string(e.what()));
    }
    if (config.contains("schema") && config.at("schema") != 1)
        throw DomainError("config: unsupported schema version (expected 1)");
    return config;
}

template <typename T>
T require(const json& j, const std::string& key) {
    if (!j.contains(key)) throw DomainError("config: missing required key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DomainError("config: bad value for '" + key + "': " + e.what());
    }
}

template <typename T>
T value_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DomainError("config: bad value for '" + key + "': " + e.what());
    }
}

SystemKind parse_system(const json& j) {
    std::string name = require<std::string>(j, "name");
    if (name == "doubling") return SystemKind::doubling_map();
    if (name == "logistic4") return SystemKind::logistic_a4();
    if (name == "tent") return SystemKind::tent_map();
    if (name == "cat2d") return SystemKind::cat_map_2d();
    if (name == "piecewise")
        return SystemKind::piecewise_expanding(
            require<std::vector<double>>(j, "slopes"),
            value_or<std::vector<double>>(j, "breakpoints", {}));
    throw DomainError("config: unknown system '" + name +
                      "' (expected doubling|logistic4|tent|cat2d|piecewise)");
}

NoiseModel parse_noise(const json& j, int dim) {
    NoiseModel noise;
    noise.half_width = require<double>(j, "half_width");
    noise.dim = value_or<int>(j, "dim", dim);
    noise.validate();
    return noise;
}

MixingRate parse_rate(const json& j) {
    MixingRate rate{require<double>(j, "c"), require<double>(j, "b"),
                    require<double>(j, "gamma")};
    rate.validate();
    return rate;
}

FunctionBounds parse_bounds(const json& j) {
    FunctionBounds fb{require<double>(j, "A"), require<double>(j, "B"),
                      require<double>(j, "sigma2")};
    fb.validate();
    return fb;
}

LossSpec parse_loss(const json& j) {
    std::string kind = value_or<std::string>(j, "kind", "least_squares");
    double clip_level = value_or<double>(j, "clip", 1.0);
    LossSpec spec;
    if (kind == "least_squares") {
        spec = LossSpec::least_squares(clip_level);
    } else if (kind == "pinball") {
        spec = LossSpec::pinball(require<double>(j, "tau"), clip_level);
    } else {
        throw DomainError("config: unknown loss kind '" + kind + "'");
    }
    if (value_or<bool>(j, "normalized", false)) spec = spec.normalized();
    spec.scale = value_or<double>(j, "scale", spec.scale);
    spec.validate();
    return spec;
}

StateFunction parse_function(const json& j) {
    std::string kind = require<std::string>(j, "kind");
    int coord = value_or<int>(j, "coordinate", 0);
    if (coord < 0) throw DomainError("config: function coordinate must be >= 0");
    auto at = [coord](std::span<const double> s) {
        if (coord >= int(s.size()))
            throw DomainError("function coordinate out of range for this system");
        return s[std::size_t(coord)];
    };
    if (kind == "identity") return [at](std::span<const double> s) { return at(s); };
    if (kind == "centered_identity")
        return [at](std::span<const double> s) { return at(s) - 0.5; };
    if (kind == "sin2pi")
        return [at](std::span<const double> s) {
            return std::sin(2.0 * std::numbers::pi * at(s));
        };
    if (kind == "cos2pi")
        return [at](std::span<const double> s) {
            return std::cos(2.0 * std::numbers::pi * at(s));
        };
    if (kind == "abs_centered")
        return [at](std::span<const double> s) { return std::abs(at(s) - 0.5) - 0.25; };
    if (kind == "sampled") {
        auto f = SampledFunction::on_grid(require<std::vector<double>>(j, "points"),
                                          require<std::vector<double>>(j, "values"),
                                          value_or<double>(j, "alpha", 1.0));
        return to_state_function(f, coord);
    }
    throw DomainError("config: unknown function kind '" + kind + "'");
}

std::string resolve_out(const CommonOptions& opts, const json& config) {
    if (!opts.out_override.empty()) return opts.out_override;
    return require<std::string>(config, "out");
}

std::uint64_t resolve_seed(const CommonOptions& opts, const json& config,
                           std::uint64_t fallback = 1) {
    if (opts.has_seed_override) return std::uint64_t(opts.seed_override);
    return value_or<std::uint64_t>(config, "seed", fallback);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open output file: " + path);
    return out;
}

void stamp(CsvWriter& csv, const CommonOptions& opts) {
    if (opts.no_timestamp) return;
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    csv.comment(std::string("generated ") + buf);
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open output file: " + path);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonOptions& opts) {
    json config = load_config(opts.config_path);
    SystemKind system = parse_system(require<json>(config, "system"));
    auto n = require<std::uint64_t>(config, "n");
    std::uint64_t seed = resolve_seed(opts, config);
    int burn_in = value_or<int>(config, "burn_in", kDefaultBurnIn);

    Trajectory t = generate_trajectory(system, n, seed, burn_in);
    std::vector<double> observed;
    bool noisy = config.contains("noise") && !config.at("noise").is_null();
    if (noisy)
        observed = add_noise(t, parse_noise(config.at("noise"), system.dimension()), seed);

    auto out = open_out(resolve_out(opts, config));
    CsvWriter csv(out);
    stamp(csv, opts);
    std::vector<std::string> header{"index"};
    for (int c = 0; c < t.dim; ++c) header.push_back("x" + std::to_string(c + 1));
    if (noisy)
        for (int c = 0; c < t.dim; ++c) header.push_back("y" + std::to_string(c + 1));
    csv.header(header);
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<std::string> row{std::to_string(i)};
        for (int c = 0; c < t.dim; ++c)
            row.push_back(CsvWriter::cell(t.data[i * std::size_t(t.dim) + std::size_t(c)]));
        if (noisy)
            for (int c = 0; c < t.dim; ++c)
                row.push_back(
                    CsvWriter::cell(observed[i * std::size_t(t.dim) + std::size_t(c)]));
        csv.row(row);
    }
    return 0;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<double, double>> read_lag_correlation_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open input_csv: " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double lag, cor;
        if (ss >> lag >> cor) rows.emplace_back(lag, cor);
    }
    if (rows.empty()) throw DomainError("input_csv holds no numeric (lag, correlation) rows");
    return rows;
}

int cmd_mixing(const CommonOptions& opts) {
    json config = load_config(opts.config_path);
    std::string out_path = resolve_out(opts, config);
    std::string rate_path = value_or<std::string>(config, "rate_out", out_path + ".rates.json");

    struct PairResult {
        std::string name;
        std::vector<std::pair<double, double>> correlations;  // (lag, cor)
        GeometricRateFit fit;
    };
    std::vector<PairResult> results;

    if (config.contains("input_csv")) {
        PairResult r;
        r.name = value_or<std::string>(config, "pair_name", "input");
        r.correlations = read_lag_correlation_csv(require<std::string>(config, "input_csv"));
        std::vector<std::pair<double, double>> abs_rows;
        for (auto [lag, cor] : r.correlations) abs_rows.emplace_back(lag, std::abs(cor));
        r.fit = fit_geometric_rate(abs_rows);
        results.push_back(std::move(r));
    } else {
        SystemKind system = parse_system(require<json>(config, "system"));
        auto n = require<std::uint64_t>(config, "n");
        std::uint64_t seed = resolve_seed(opts, config);

        std::vector<std::uint64_t> lags;
        if (config.contains("lags")) {
            lags = require<std::vector<std::uint64_t>>(config, "lags");
        } else {
            auto max_lag = value_or<std::uint64_t>(config, "max_lag", 8);
            for (std::uint64_t l = 1; l <= max_lag; ++l) lags.push_back(l);
        }
        if (lags.empty()) throw DomainError("config: no lags requested");

        const json& pairs = require<json>(config, "pairs");
        if (!pairs.is_array() || pairs.empty())
            throw DomainError("config: 'pairs' must be a nonempty array of {name, h, g}");

        Trajectory path = generate_trajectory(system, n, seed);
        for (const auto& p : pairs) {
            PairResult r;
            r.name = require<std::string>(p, "name");
            StateFunction h = parse_function(require<json>(p, "h"));
            StateFunction g = parse_function(require<json>(p, "g"));
            std::vector<std::pair<double, double>> abs_rows;
            for (std::uint64_t lag : lags) {
                double cor = empirical_correlation(path, h, g, lag);
                r.correlations.emplace_back(double(lag), cor);
                abs_rows.emplace_back(double(lag), std::abs(cor));
            }
            r.fit = fit_geometric_rate(abs_rows);
            results.push_back(std::move(r));
        }
    }

    auto out = open_out(out_path);
    CsvWriter csv(out);
    stamp(csv, opts);
    csv.header({"pair", "lag", "correlation", "abs_correlation"});
    for (const auto& r : results)
        for (auto [lag, cor] : r.correlations)
            csv.row({r.name, CsvWriter::cell(lag), CsvWriter::cell(cor),
                     CsvWriter::cell(std::abs(cor))});

    json rates = {{"schema", 1}, {"pairs", json::array()}};
    for (const auto& r : results)
        rates["pairs"].push_back({{"name", r.name},
                                  {"c", r.fit.rate.c},
                                  {"b", r.fit.rate.b},
                                  {"gamma", r.fit.rate.gamma},
                                  {"rss", r.fit.rss},
                                  {"points", r.fit.used_points}});
    write_json_file(rate_path, rates);
    return 0;
}

// ---------------------------------------------------------------------------

ComparatorParams parse_comparators(const json& config, double gamma) {
    ComparatorParams params;
    params.gamma = gamma;
    if (!config.contains("comparators")) return params;
    const json& c = config.at("comparators");
    auto read = [&c](const char* key, std::optional<double>& slot) {
        if (!c.contains(key)) return;
        if (c.at(key).is_null())
            slot.reset();
        else
            slot = c.at(key).get<double>();
    };
    read("hoeffding_c", params.hoeffding_c);
    read("alpha_c", params.alpha_c);
    read("mpr_c", params.mpr_c);
    read("mpr_v2", params.mpr_v2);
    read("markov_sigma2", params.markov_sigma2);
    read("weak_c1", params.weak_c1);
    read("weak_c2", params.weak_c2);
    return params;
}

int cmd_bound(const CommonOptions& opts) {
    json config = load_config(opts.config_path);
    auto ns = require<std::vector<std::uint64_t>>(config, "ns");
    auto eps_grid = require<std::vector<double>>(config, "eps");
    FunctionBounds fb = parse_bounds(require<json>(config, "bounds"));
    double gamma = require<double>(config, "gamma");
    ComparatorParams params = parse_comparators(config, gamma);
    if (ns.empty() || eps_grid.empty()) throw DomainError("config: empty n or eps grid");

    auto out = open_out(resolve_out(opts, config));
    CsvWriter csv(out);
    stamp(csv, opts);
    csv.header({"n", "eps", "name", "raw", "value", "evaluated"});
    for (std::uint64_t n : ns) {
        for (double eps : eps_grid) {
            double raw = bernstein_tail_bound_raw(n, eps, fb, gamma);
            csv.row({CsvWriter::cell(n), CsvWriter::cell(eps), "c_mixing_bernstein",
                     CsvWriter::cell(raw), CsvWriter::cell(std::min(1.0, raw)),
                     CsvWriter::cell(true)});
            for (const auto& row : comparator_bounds(n, eps, fb, params))
                csv.row({CsvWriter::cell(n), CsvWriter::cell(eps), row.name,
                         row.evaluated ? CsvWriter::cell(row.raw) : "not_evaluated",
                         row.evaluated ? CsvWriter::cell(row.value) : "not_evaluated",
                         CsvWriter::cell(row.evaluated)});
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_validate(const CommonOptions& opts, const WorkerPool& pool) {
    json config = load_config(opts.config_path);
    SystemKind system = parse_system(require<json>(config, "system"));
    StateFunction h = parse_function(require<json>(config, "h"));
    FunctionBounds fb = parse_bounds(require<json>(config, "bounds"));
    MixingRate rate = parse_rate(require<json>(config, "rate"));
    auto n = require<std::uint64_t>(config, "n");
    auto eps_grid = require<std::vector<double>>(config, "eps_grid");
    auto replicas = require<std::uint64_t>(config, "replicas");
    std::uint64_t seed = resolve_seed(opts, config);

    TailValidationReport report =
        mc_validate_tail(system, h, fb, rate, n, eps_grid, replicas, seed, &pool);

    auto out = open_out(resolve_out(opts, config));
    CsvWriter csv(out);
    stamp(csv, opts);
    csv.comment("system=" + system.name() + " n=" + std::to_string(n) +
                " replicas=" + std::to_string(replicas) + " n0=" + std::to_string(report.n0) +
                " centering_shift=" + format_double(report.centering_shift));
    csv.header({"eps", "empirical_tail", "se", "bound", "violated"});
    for (const auto& row : report.rows)
        csv.row({CsvWriter::cell(row.eps), CsvWriter::cell(row.empirical_tail),
                 CsvWriter::cell(row.std_error), CsvWriter::cell(row.bound),
                 CsvWriter::cell(row.violated)});

    if (report.any_violated()) {
        std::cerr << "validate: empirical tail exceeded the bound on at least one row\n";
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_rates(const CommonOptions& opts, const WorkerPool& pool) {
    json config = load_config(opts.config_path);
    RatesSpec spec;
    std::string inputs = value_or<std::string>(config, "inputs", "system");
    if (inputs == "iid_uniform") {
        spec.iid_inputs = true;
    } else if (inputs == "system") {
        spec.iid_inputs = false;
    } else {
        throw DomainError("config: 'inputs' must be system|iid_uniform");
    }
    if (config.contains("system")) spec.system = parse_system(config.at("system"));
    spec.target = value_or<std::string>(config, "target", "sin2pi");
    spec.noise_half_width = value_or<double>(config, "noise_half_width", 0.2);
    spec.sample_sizes = require<std::vector<std::size_t>>(config, "ns");
    if (config.contains("seeds")) {
        spec.seeds = require<std::vector<std::uint64_t>>(config, "seeds");
    } else {
        auto count = value_or<std::uint64_t>(config, "n_seeds", 1);
        std::uint64_t base = resolve_seed(opts, config);
        for (std::uint64_t s = 0; s < count; ++s) spec.seeds.push_back(base + s);
    }
    spec.clip_level = value_or<double>(config, "clip", 1.0);
    spec.grid_cap = value_or<std::size_t>(config, "grid_cap", 8);
    spec.test_points = value_or<std::size_t>(config, "test_points", 100000);
    std::string selection = value_or<std::string>(config, "selection", "tv");
    if (selection == "tv") {
        spec.selection = SelectionMode::TrainValidation;
    } else if (selection == "schedule") {
        spec.selection = SelectionMode::Schedule;
        spec.schedule_smoothness = value_or<double>(config, "smoothness", 1.0);
    } else {
        throw DomainError("config: 'selection' must be tv|schedule");
    }

    RatesResult result = run_rates_experiment(spec, &pool);

    std::string out_path = resolve_out(opts, config);
    auto out = open_out(out_path);
    CsvWriter csv(out);
    stamp(csv, opts);
    csv.header({"n", "seed", "lambda", "sigma", "excess_risk"});
    for (const auto& row : result.rows)
        csv.row({std::to_string(row.n), std::to_string(row.seed), CsvWriter::cell(row.lambda),
                 CsvWriter::cell(row.sigma), CsvWriter::cell(row.excess_risk)});

    json summary = {{"schema", 1}, {"medians", json::array()}};
    for (auto [n, median] : result.median_risk)
        summary["medians"].push_back({{"n", n}, {"median_excess_risk", median}});
    summary["slope"] = result.slope ? json(*result.slope) : json(nullptr);
    write_json_file(value_or<std::string>(config, "summary_out", out_path + ".summary.json"),
                    summary);
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_forecast(const CommonOptions& opts, const WorkerPool& pool) {
    json config = load_config(opts.config_path);
    SystemKind system = parse_system(require<json>(config, "system"));
    NoiseModel noise = parse_noise(require<json>(config, "noise"), system.dimension());
    auto n = require<std::uint64_t>(config, "n");
    std::uint64_t seed = resolve_seed(opts, config);
    LossSpec loss_spec =
        config.contains("loss") ? parse_loss(config.at("loss")) : LossSpec::least_squares(1.0);
    auto grid_cap = value_or<std::size_t>(config, "grid_cap", 8);
    auto mc_n = value_or<std::uint64_t>(config, "mc_n", 10000);

    ForecastDataset ds = build_pairs(system, noise, n, seed);
    HyperGrid grid = make_hypergrid(ds.pairs(), system.dimension(), grid_cap);
    VectorForecaster forecaster = train_forecaster(ds, loss_spec, grid, &pool);
    ForecastRisk risk = forecast_risk_mc(forecaster, system, noise, loss_spec, mc_n,
                                         derive_seed(seed, 0x7269736bULL), &pool);

    if (config.contains("model_out")) {
        json models = {{"schema", 1}, {"models", json::array()}};
        for (const auto& model : forecaster.models)
            models["models"].push_back(json::parse(to_json_string(model)));
        write_json_file(require<std::string>(config, "model_out"), models);
    }

    auto out = open_out(resolve_out(opts, config));
    CsvWriter csv(out);
    stamp(csv, opts);
    csv.comment("total_risk=" + format_double(risk.total) +
                " total_se=" + format_double(risk.std_error));
    csv.header({"n", "coordinate", "lambda", "sigma", "train_risk", "mc_risk", "se"});
    for (std::size_t j = 0; j < forecaster.models.size(); ++j) {
        const auto& fit = forecaster.fits[j];
        csv.row({std::to_string(n), std::to_string(j + 1), CsvWriter::cell(fit.lambda),
                 CsvWriter::cell(fit.sigma), CsvWriter::cell(fit.train_risk),
                 CsvWriter::cell(risk.per_coordinate[j]),
                 CsvWriter::cell(risk.per_coordinate_se[j])});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concentration bounds and kernel learning experiments for chaotic time series"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string command;
    for (const char* name : {"simulate", "mixing", "bound", "validate", "rates", "forecast"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config_path, "JSON experiment config")->required();
        sub->add_option("--out", opts.out_override, "override the config's output path");
        auto* seed_opt = sub->add_option("--seed", opts.seed_override,
                                         "override the config's base seed");
        sub->add_option("--workers", opts.workers,
                        "worker threads (default: available parallelism)");
        sub->add_flag("--no-timestamp", opts.no_timestamp,
                      "omit the timestamp comment from CSV output");
        sub->callback([&, name, seed_opt]() {
            command = name;
            opts.has_seed_override = seed_opt->count() > 0;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        WorkerPool pool(opts.workers);
        if (command == "simulate") return cmd_simulate(opts);
        if (command == "mixing") return cmd_mixing(opts);
        if (command == "bound") return cmd_bound(opts);
        if (command == "validate") return cmd_validate(opts, pool);
        if (command == "rates") return cmd_rates(opts, pool);
        if (command == "forecast") return cmd_forecast(opts, pool);
        std::cerr << "unknown command\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
