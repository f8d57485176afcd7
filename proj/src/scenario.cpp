#include "fgen/scenario.hpp"

#include "fgen/path_core.hpp"
#include "fgen/strategies.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fgen {

using nlohmann::json;

namespace {

// ---- strict JSON reading ---------------------------------------------------

void check_object(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!keys.count(key)) throw ValidationError(where + ": unknown key '" + key + "'");
}

double read_number(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
    return v.get<double>();
}

// signed storage happens for values built in C++ rather than parsed from text
bool is_count(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t read_unsigned(const json& obj, const char* key, std::uint64_t fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!is_count(v)) throw ValidationError(where + "." + key + ": expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool read_bool(const json& obj, const char* key, bool fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ValidationError(where + "." + key + ": expected true or false");
    return v.get<bool>();
}

std::string read_string(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ValidationError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

std::vector<double> read_numbers(const json& obj, const char* key, std::vector<double> fallback,
                                 const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ValidationError(where + "." + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ValidationError(where + "." + key + ": expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::size_t> read_counts(const json& obj, const char* key, std::vector<std::size_t> fallback,
                                     const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array()) throw ValidationError(where + "." + key + ": expected an array of integers");
    std::vector<std::size_t> out;
    for (const auto& e : v) {
        if (!is_count(e))
            throw ValidationError(where + "." + key + ": expected an array of nonnegative integers");
        out.push_back(e.get<std::size_t>());
    }
    return out;
}

// ---- helpers ---------------------------------------------------------------

bool has_additive(GenerationMode m) { return m != GenerationMode::multiplicative; }
bool has_multiplicative(GenerationMode m) { return m != GenerationMode::additive; }

std::vector<double> initial_weights(const ModelSpec& spec) {
    if (spec.kind == ModelKind::oscillator_counterexample) return {0.5, 0.5};
    double total = 0.0;
    for (double s : spec.initial_caps) total += s;
    std::vector<double> mu(spec.initial_caps.size());
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = spec.initial_caps[i] / total;
    return mu;
}

GeneratingFunction build_generator(const ScenarioConfig& config) {
    GeneratingFunction g = GeneratingFunction::builtin(config.generator.kind, config.generator.params);
    if (config.generator.normalize) g = normalize(g, initial_weights(config.model));
    return g;
}

SimConfig effective_sim(const ScenarioConfig& config, const RunOptions& options) {
    SimConfig sim = config.simulation;
    if (options.seed_override) sim.seed = *options.seed_override;
    if (config.model.kind == ModelKind::oscillator_counterexample) sim.ensemble_size = 1;
    return sim;
}

std::string csv_header(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (k) out += ',';
        out += names[k];
    }
    return out + '\n';
}

void append_row(std::string& out, const std::vector<double>& row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) out += ',';
        out += format_number(row[k]);
    }
    out += '\n';
}

void write_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + file.string() + "' for writing");
    os << content;
    if (!os) throw std::runtime_error("failed writing '" + file.string() + "'");
}

std::string path_file_name(const std::string& name, const char* tag, std::size_t k) {
    return name + "_" + tag + std::to_string(k) + ".csv";
}

double max_abs(double a, double b) { return std::max(a, std::abs(b)); }

// JSON refuses non-finite doubles; they become null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

VectorSeries safe_weights(const StrategySeries& s, const MarketPath& path) {
    VectorSeries pi(path.length(), path.dim(), std::nan(""));
    for (std::size_t n = 0; n < path.length(); ++n) {
        if (s.value[n] == 0.0) continue;
        for (std::size_t i = 0; i < path.dim(); ++i)
            pi(n, i) = path.weights()(n, i) * s.holdings(n, i) / s.value[n];
    }
    return pi;
}

// ---- subcommands -----------------------------------------------------------

struct SimulateResult {
    std::string csv;
    double first_absorption = AbsorptionTimes::never;
    double concentration = AbsorptionTimes::never;
    std::vector<double> final_weights;
};

RunResult run_simulate(const ScenarioConfig& config, const SimConfig& sim, const RunOptions& options,
                       const std::filesystem::path& out_dir) {
    const std::size_t paths = sim.ensemble_size;
    const std::size_t csv_paths = std::min(config.output.csv_paths, paths);
    std::vector<SimulateResult> results(paths);
    detail::parallel_for(paths, options.threads, [&](std::size_t k) {
        const MarketPath path = simulate(config.model, sim, k);
        SimulateResult& r = results[k];
        const AbsorptionTimes at = absorption_times(path);
        r.first_absorption = at.first;
        r.concentration = at.concentration;
        const auto last = path.weights_at(path.length() - 1);
        r.final_weights.assign(last.begin(), last.end());
        if (k >= csv_paths) return;
        std::vector<std::string> names{"t"};
        for (std::size_t i = 1; i <= path.dim(); ++i) names.push_back("mu_" + std::to_string(i));
        for (std::size_t i = 1; i <= path.dim(); ++i) names.push_back("cap_" + std::to_string(i));
        r.csv = csv_header(names);
        std::vector<double> row(1 + 2 * path.dim());
        for (std::size_t n = 0; n < path.length(); ++n) {
            row[0] = path.grid()[n];
            for (std::size_t i = 0; i < path.dim(); ++i) {
                row[1 + i] = path.weights()(n, i);
                row[1 + path.dim() + i] = path.caps()(n, i);
            }
            append_row(r.csv, row);
        }
    });

    RunResult out;
    for (std::size_t k = 0; k < csv_paths; ++k) {
        const auto file = out_dir / path_file_name(config.name, "simulate_path", k);
        write_file(file, results[k].csv);
        out.artifacts.push_back(file);
    }
    const std::size_t d = results.front().final_weights.size();
    std::vector<double> mean(d, 0.0);
    double absorbed = 0.0;
    json absorption = json::array();
    for (const auto& r : results) {
        for (std::size_t i = 0; i < d; ++i) mean[i] += r.final_weights[i] / static_cast<double>(paths);
        absorbed += std::isfinite(r.first_absorption);
        absorption.push_back(number_or_null(r.first_absorption));
    }
    out.summary["final_weights_mean"] = mean;
    out.summary["fraction_absorbed"] = absorbed / static_cast<double>(paths);
    out.summary["first_absorption_time"] = absorption;
    return out;
}

struct GenerateResult {
    std::string csv;
    double additive_identity = 0.0;        // |V - (G + Gamma)|
    double additive_self_financing = 0.0;  // |V - V(0) - gains|
    double multiplicative_identity = 0.0;  // |sum psi mu - V|
    double master_residual = 0.0;          // max |V - G K| / V
    double numeraire_value = 0.0;
    double numeraire_self_financing = 0.0;
    double weights_sum = 0.0;
    double gamma_gap = std::nan("");       // |Gamma_def(T) - Gamma_analytic(T)|
    double gamma_final = 0.0;
    double v_additive_final = std::nan("");
    double v_multiplicative_final = std::nan("");
};

RunResult run_generate(const ScenarioConfig& config, const SimConfig& sim, const RunOptions& options,
                       const std::filesystem::path& out_dir) {
    const GeneratingFunction G = build_generator(config);
    const std::size_t paths = sim.ensemble_size;
    const std::size_t csv_paths = std::min(config.output.csv_paths, paths);
    const bool add = has_additive(config.mode);
    const bool mult = has_multiplicative(config.mode);

    std::vector<GenerateResult> results(paths);
    detail::parallel_for(paths, options.threads, [&](std::size_t k) {
        const MarketPath path = simulate(config.model, sim, k);
        const std::size_t d = path.dim();
        const auto& w = path.weights();
        GenerateResult& r = results[k];
        const PathEvaluation eval = evaluate_along(G, path);
        const Series gamma = gamma_by_definition(eval, path).values;
        r.gamma_final = gamma.back();
        if (G.has_analytic_gamma()) r.gamma_gap = std::abs(gamma.back() - gamma_analytic(G, path).values.back());

        std::optional<StrategySeries> a, m;
        if (add) {
            a = additive_generate(G, path);
            const Series gains = left_riemann_integral(a->holdings, w);
            for (std::size_t n = 0; n < path.length(); ++n) {
                r.additive_identity = max_abs(r.additive_identity, a->value[n] - (eval.g[n] + gamma[n]));
                r.additive_self_financing =
                    max_abs(r.additive_self_financing, a->value[n] - a->value[0] - gains[n]);
            }
            r.v_additive_final = a->value.back();
        }
        if (mult) {
            m = multiplicative_generate(G, path);
            const Series direct = strategy_value(m->holdings, path);
            for (std::size_t n = 0; n < path.length(); ++n) {
                r.multiplicative_identity = max_abs(r.multiplicative_identity, direct[n] - m->value[n]);
                r.master_residual = std::max(r.master_residual, m->master_residual[n]);
            }
            r.v_multiplicative_final = m->value.back();
        }
        const StrategySeries& primary = a ? *a : *m;
        const NumeraireReport nr = numeraire_invariance_check(primary, path.caps());
        r.numeraire_value = nr.value_identity_residual;
        r.numeraire_self_financing = nr.self_financing_residual;
        const VectorSeries pi = safe_weights(primary, path);
        for (std::size_t n = 0; n < path.length(); ++n) {
            if (primary.value[n] == 0.0) continue;
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) s += pi(n, i);
            r.weights_sum = max_abs(r.weights_sum, s - 1.0);
        }

        if (k >= csv_paths) return;
        std::vector<std::string> names{"t"};
        auto add_block = [&](const char* prefix) {
            for (std::size_t i = 1; i <= d; ++i) names.push_back(prefix + std::to_string(i));
        };
        add_block("mu_");
        names.insert(names.end(), {"gamma", "v_additive", "v_multiplicative"});
        if (config.output.holdings) {
            add_block("phi_");
            add_block("psi_");
        }
        if (config.output.weights) add_block("pi_");
        r.csv = csv_header(names);
        const double nan = std::nan("");
        std::vector<double> row;
        for (std::size_t n = 0; n < path.length(); ++n) {
            row.clear();
            row.push_back(path.grid()[n]);
            for (std::size_t i = 0; i < d; ++i) row.push_back(w(n, i));
            row.push_back(gamma[n]);
            row.push_back(a ? a->value[n] : nan);
            row.push_back(m ? m->value[n] : nan);
            if (config.output.holdings) {
                for (std::size_t i = 0; i < d; ++i) row.push_back(a ? a->holdings(n, i) : nan);
                for (std::size_t i = 0; i < d; ++i) row.push_back(m ? m->holdings(n, i) : nan);
            }
            if (config.output.weights)
                for (std::size_t i = 0; i < d; ++i) row.push_back(pi(n, i));
            append_row(r.csv, row);
        }
    });

    RunResult out;
    for (std::size_t k = 0; k < csv_paths; ++k) {
        const auto file = out_dir / path_file_name(config.name, "path", k);
        write_file(file, results[k].csv);
        out.artifacts.push_back(file);
    }

    json residuals;
    auto worst = [&](auto field) {
        double v = 0.0;
        for (const auto& r : results) v = std::max(v, r.*field);
        return v;
    };
    if (add) {
        residuals["additive_value_identity"] = worst(&GenerateResult::additive_identity);
        residuals["additive_self_financing"] = worst(&GenerateResult::additive_self_financing);
    }
    if (mult) {
        residuals["multiplicative_value_identity"] = worst(&GenerateResult::multiplicative_identity);
        residuals["master_equation_relative"] = worst(&GenerateResult::master_residual);
    }
    residuals["numeraire_value_identity"] = worst(&GenerateResult::numeraire_value);
    residuals["numeraire_self_financing"] = worst(&GenerateResult::numeraire_self_financing);
    residuals["portfolio_weight_sum"] = worst(&GenerateResult::weights_sum);
    if (G.has_analytic_gamma()) residuals["gamma_analytic_gap_at_T"] = worst(&GenerateResult::gamma_gap);
    out.summary["residuals"] = residuals;

    double gamma_mean = 0.0, va = 0.0, vm = 0.0;
    for (const auto& r : results) {
        gamma_mean += r.gamma_final;
        va += r.v_additive_final;
        vm += r.v_multiplicative_final;
    }
    const double n = static_cast<double>(paths);
    out.summary["mean_gamma_at_T"] = gamma_mean / n;
    out.summary["mean_v_additive_at_T"] = number_or_null(va / n);
    out.summary["mean_v_multiplicative_at_T"] = number_or_null(vm / n);

    if (config.supermartingale) {
        const SupermartingaleReport sm =
            supermartingale_mc_test(G, config.model, sim, config.supermartingale->checkpoints, options.threads);
        json cps = json::array();
        for (const auto& c : sm.checkpoints)
            cps.push_back({{"t", c.time}, {"mean", c.mean}, {"std_error", c.std_error}});
        out.summary["supermartingale"] = {{"checkpoints", cps},
                                          {"diff_means", sm.diff_means},
                                          {"diff_std_errors", sm.diff_std_errors},
                                          {"nonincreasing", sm.nonincreasing},
                                          {"nondecreasing", sm.nondecreasing},
                                          {"seed", sm.seed},
                                          {"paths", sm.paths},
                                          {"steps", sm.steps}};
    }
    return out;
}

json report_to_json(const OutperformanceReport& r) {
    json j = {{"mode", to_string(r.mode)},
              {"t_star", r.t_star},
              {"t_star_index", r.t_star_index},
              {"fraction_condition", r.fraction_condition},
              {"fraction_outperform", r.fraction_outperform},
              {"fraction_certified", r.fraction_certified}};
    if (r.mode == StrategyMode::multiplicative) {
        j["epsilon"] = r.epsilon;
        j["kappa"] = r.kappa;
        j["shift_c"] = r.shift_c;
        j["value_bound"] = r.value_bound;
    }
    return j;
}

RunResult run_outperform(const ScenarioConfig& config, const SimConfig& sim, const RunOptions& options,
                         const std::filesystem::path& out_dir) {
    if (!config.outperformance)
        throw ValidationError("outperform needs diagnostics.outperformance in the config");
    const GeneratingFunction G = build_generator(config);
    const auto paths = simulate_ensemble(config.model, sim, options.threads);

    std::vector<OutperformanceReport> reports;
    for (double t : config.outperformance->t_star) {
        if (has_additive(config.mode))
            reports.push_back(check_additive_outperformance(G, paths, t, options.threads));
        if (has_multiplicative(config.mode))
            reports.push_back(check_multiplicative_outperformance(G, paths, t, config.outperformance->epsilon,
                                                                  options.threads));
    }

    std::string csv = csv_header({"mode", "t_star", "path", "gamma_at_t_star", "condition",
                                  "value_at_t_star", "final_value", "min_value", "certified"});
    json list = json::array();
    for (const auto& r : reports) {
        list.push_back(report_to_json(r));
        for (std::size_t k = 0; k < r.paths.size(); ++k) {
            const PathOutcome& o = r.paths[k];
            csv += to_string(r.mode) + ',' + format_number(r.t_star) + ',' + std::to_string(k) + ',' +
                   format_number(o.gamma_at_t_star) + ',' + (o.condition ? "1" : "0") + ',' +
                   format_number(o.value_at_t_star) + ',' + format_number(o.final_value) + ',' +
                   format_number(o.min_value) + ',' + (o.certified ? "1" : "0") + '\n';
        }
    }
    RunResult out;
    const auto file = out_dir / (config.name + "_outperformance.csv");
    write_file(file, csv);
    out.artifacts.push_back(file);
    out.summary["outperformance"] = list;
    return out;
}

RunResult run_counterexample(const ScenarioConfig& config, const SimConfig& sim, const RunOptions& options,
                             const std::filesystem::path& out_dir) {
    const CounterexampleSpec spec = config.counterexample.value_or(CounterexampleSpec{});
    const VariationReport rep =
        variation_divergence_report(spec.n_max, spec.qv_paths, spec.qv_steps, sim.seed, options.threads);
    std::string csv = csv_header({"n_max", "points", "tv_x", "tv_x_bound", "tv_sqrt_x", "tv_sqrt_x_lower"});
    json rows = json::array();
    for (const auto& r : rep.rows) {
        csv += std::to_string(r.n_max) + ',' + std::to_string(r.points) + ',' + format_number(r.tv_x) + ',' +
               format_number(r.tv_x_bound) + ',' + format_number(r.tv_sqrt_x) + ',' +
               format_number(r.tv_sqrt_x_lower) + '\n';
        rows.push_back({{"n_max", r.n_max},
                        {"points", r.points},
                        {"tv_x", r.tv_x},
                        {"tv_x_bound", r.tv_x_bound},
                        {"tv_sqrt_x", r.tv_sqrt_x},
                        {"tv_sqrt_x_lower", r.tv_sqrt_x_lower}});
    }
    RunResult out;
    const auto file = out_dir / (config.name + "_counterexample.csv");
    write_file(file, csv);
    out.artifacts.push_back(file);
    out.summary["variation"] = {{"rows", rows}, {"log_slope", rep.log_slope}};
    if (rep.qv) {
        out.summary["quadratic_variation"] = {{"paths", rep.qv->paths},
                                              {"coarse_steps", rep.qv->steps},
                                              {"fine_steps", 4 * rep.qv->steps},
                                              {"seed", rep.qv->seed},
                                              {"fraction_growing", rep.qv->fraction_growing},
                                              {"mean_coarse", rep.qv->mean_coarse},
                                              {"mean_fine", rep.qv->mean_fine}};
    }
    return out;
}

}  // namespace

std::string to_string(GenerationMode mode) {
    switch (mode) {
        case GenerationMode::additive: return "additive";
        case GenerationMode::multiplicative: return "multiplicative";
        case GenerationMode::both: return "both";
    }
    return "unknown";
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void ScenarioConfig::validate() const {
    if (name.empty() || name.find_first_of("/\\") != std::string::npos)
        throw ValidationError("name must be a nonempty file-name-safe string");
    model.validate();
    simulation.validate();
    const std::size_t d = model.dim();
    const auto& p = generator.params;
    if ((generator.kind == GeneratorKind::large_cap || generator.kind == GeneratorKind::small_cap) &&
        (p.m < 1 || p.m >= d))
        throw ValidationError("generator.m must satisfy 1 <= m <= d-1");
    if (generator.kind == GeneratorKind::quadratic && has_multiplicative(mode) && !(p.c > 1.0))
        throw ValidationError("quadratic generating function needs c > 1 for multiplicative mode (got c = " +
                              format_number(p.c) + ")");
    if (outperformance) {
        if (outperformance->t_star.empty()) throw ValidationError("outperformance.t_star is empty");
        for (double t : outperformance->t_star)
            if (!(t >= 0.0 && t <= simulation.horizon))
                throw ValidationError("outperformance.t_star must lie in [0, horizon]");
        if (!(outperformance->epsilon > 0.0)) throw ValidationError("outperformance.epsilon must be > 0");
    }
    if (supermartingale) {
        if (model.kind != ModelKind::two_asset_martingale && model.kind != ModelKind::absorbed_brownian_pair)
            throw ValidationError("supermartingale test needs a model with martingale weights");
        if (supermartingale->checkpoints < 1 || supermartingale->checkpoints > simulation.steps)
            throw ValidationError("supermartingale.checkpoints must lie in [1, steps]");
    }
    if (counterexample) {
        if (counterexample->n_max.empty()) throw ValidationError("counterexample.n_max is empty");
        for (std::size_t k = 0; k < counterexample->n_max.size(); ++k)
            if (counterexample->n_max[k] < 1 || (k && counterexample->n_max[k] <= counterexample->n_max[k - 1]))
                throw ValidationError("counterexample.n_max must be increasing positive integers");
        if (counterexample->qv_steps < 1) throw ValidationError("counterexample.qv_steps must be >= 1");
    }
    // the generator must be evaluable at mu(0)
    const GeneratingFunction g = GeneratingFunction::builtin(generator.kind, p);
    const double g0 = g.value(initial_weights(model));
    if (generator.normalize && g0 < 0.0)
        throw ValidationError("cannot normalize: G(mu(0)) < 0");
}

ScenarioConfig parse_scenario(const json& j) {
    check_object(j, "config", {"name", "model", "simulation", "generator", "mode", "diagnostics", "output"});
    ScenarioConfig c;
    c.name = read_string(j, "name", c.name, "config");

    if (j.contains("model")) {
        const json& m = j.at("model");
        const std::string w = "model";
        check_object(m, w, {"kind", "initial_caps", "drifts", "volatilities", "volatility", "atlas_drift",
                            "oscillator_n_max"});
        c.model.kind = model_kind_from_string(read_string(m, "kind", to_string(c.model.kind), w));
        c.model.initial_caps = read_numbers(m, "initial_caps", c.model.initial_caps, w);
        c.model.drifts = read_numbers(m, "drifts", c.model.drifts, w);
        c.model.volatilities = read_numbers(m, "volatilities", c.model.volatilities, w);
        c.model.volatility = read_number(m, "volatility", c.model.volatility, w);
        c.model.atlas_drift = read_number(m, "atlas_drift", c.model.atlas_drift, w);
        c.model.oscillator_n_max = read_unsigned(m, "oscillator_n_max", c.model.oscillator_n_max, w);
    }
    if (j.contains("simulation")) {
        const json& s = j.at("simulation");
        const std::string w = "simulation";
        check_object(s, w, {"horizon", "steps", "seed", "ensemble_size", "noise_resolution"});
        c.simulation.horizon = read_number(s, "horizon", c.simulation.horizon, w);
        c.simulation.steps = read_unsigned(s, "steps", c.simulation.steps, w);
        c.simulation.seed = read_unsigned(s, "seed", c.simulation.seed, w);
        c.simulation.ensemble_size = read_unsigned(s, "ensemble_size", c.simulation.ensemble_size, w);
        c.simulation.noise_resolution = read_unsigned(s, "noise_resolution", c.simulation.noise_resolution, w);
    }
    if (j.contains("generator")) {
        const json& g = j.at("generator");
        const std::string w = "generator";
        check_object(g, w, {"kind", "c", "m", "normalize"});
        c.generator.kind = generator_kind_from_string(read_string(g, "kind", to_string(c.generator.kind), w));
        c.generator.params.c = read_number(g, "c", c.generator.params.c, w);
        c.generator.params.m = read_unsigned(g, "m", c.generator.params.m, w);
        c.generator.normalize = read_bool(g, "normalize", c.generator.normalize, w);
    }
    const std::string mode = read_string(j, "mode", to_string(c.mode), "config");
    if (mode == "additive") c.mode = GenerationMode::additive;
    else if (mode == "multiplicative") c.mode = GenerationMode::multiplicative;
    else if (mode == "both") c.mode = GenerationMode::both;
    else throw ValidationError("config.mode: expected additive, multiplicative or both");

    if (j.contains("diagnostics")) {
        const json& d = j.at("diagnostics");
        check_object(d, "diagnostics", {"outperformance", "supermartingale", "counterexample"});
        if (d.contains("outperformance")) {
            const json& o = d.at("outperformance");
            const std::string w = "diagnostics.outperformance";
            check_object(o, w, {"t_star", "epsilon"});
            OutperformanceSpec spec;
            if (!o.contains("t_star")) throw ValidationError(w + ".t_star is required");
            spec.t_star = read_numbers(o, "t_star", {}, w);
            spec.epsilon = read_number(o, "epsilon", spec.epsilon, w);
            c.outperformance = spec;
        }
        if (d.contains("supermartingale")) {
            const json& s = d.at("supermartingale");
            const std::string w = "diagnostics.supermartingale";
            check_object(s, w, {"checkpoints"});
            SupermartingaleSpec spec;
            spec.checkpoints = read_unsigned(s, "checkpoints", spec.checkpoints, w);
            c.supermartingale = spec;
        }
        if (d.contains("counterexample")) {
            const json& s = d.at("counterexample");
            const std::string w = "diagnostics.counterexample";
            check_object(s, w, {"n_max", "qv_paths", "qv_steps"});
            CounterexampleSpec spec;
            spec.n_max = read_counts(s, "n_max", spec.n_max, w);
            spec.qv_paths = read_unsigned(s, "qv_paths", spec.qv_paths, w);
            spec.qv_steps = read_unsigned(s, "qv_steps", spec.qv_steps, w);
            c.counterexample = spec;
        }
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_object(o, "output", {"csv_paths", "holdings", "weights"});
        c.output.csv_paths = read_unsigned(o, "csv_paths", c.output.csv_paths, "output");
        c.output.holdings = read_bool(o, "holdings", c.output.holdings, "output");
        c.output.weights = read_bool(o, "weights", c.output.weights, "output");
    }
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw ValidationError("cannot read config '" + file.string() + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ValidationError("config '" + file.string() + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(j);
}

json to_json(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    j["model"] = {{"kind", to_string(c.model.kind)},
                  {"initial_caps", c.model.initial_caps},
                  {"drifts", c.model.drifts},
                  {"volatilities", c.model.volatilities},
                  {"volatility", c.model.volatility},
                  {"atlas_drift", c.model.atlas_drift},
                  {"oscillator_n_max", c.model.oscillator_n_max}};
    j["simulation"] = {{"horizon", c.simulation.horizon},
                       {"steps", c.simulation.steps},
                       {"seed", c.simulation.seed},
                       {"ensemble_size", c.simulation.ensemble_size},
                       {"noise_resolution", c.simulation.noise_resolution}};
    j["generator"] = {{"kind", to_string(c.generator.kind)},
                      {"c", c.generator.params.c},
                      {"m", c.generator.params.m},
                      {"normalize", c.generator.normalize}};
    j["mode"] = to_string(c.mode);
    json d = json::object();
    if (c.outperformance)
        d["outperformance"] = {{"t_star", c.outperformance->t_star}, {"epsilon", c.outperformance->epsilon}};
    if (c.supermartingale) d["supermartingale"] = {{"checkpoints", c.supermartingale->checkpoints}};
    if (c.counterexample)
        d["counterexample"] = {{"n_max", c.counterexample->n_max},
                               {"qv_paths", c.counterexample->qv_paths},
                               {"qv_steps", c.counterexample->qv_steps}};
    j["diagnostics"] = d;
    j["output"] = {{"csv_paths", c.output.csv_paths},
                   {"holdings", c.output.holdings},
                   {"weights", c.output.weights}};
    return j;
}

std::filesystem::path resolve_out_dir(const std::filesystem::path& requested) {
    if (!requested.empty()) return requested;
    if (const char* env = std::getenv("FGEN_OUT_DIR"); env && *env) return env;
    return "out";
}

RunResult run_command(const std::string& command, const ScenarioConfig& config, const RunOptions& options) {
    config.validate();
    const SimConfig sim = effective_sim(config, options);
    const std::filesystem::path out_dir = resolve_out_dir(options.out_dir);
    std::filesystem::create_directories(out_dir);

    RunResult result;
    if (command == "simulate") result = run_simulate(config, sim, options, out_dir);
    else if (command == "generate") result = run_generate(config, sim, options, out_dir);
    else if (command == "outperform") result = run_outperform(config, sim, options, out_dir);
    else if (command == "counterexample") result = run_counterexample(config, sim, options, out_dir);
    else throw ValidationError("unknown command '" + command + "'");

    ScenarioConfig resolved = config;
    resolved.simulation = sim;
    json summary = {{"command", command},
                    {"config", to_json(resolved)},
                    {"seed", sim.seed},
                    {"paths", sim.ensemble_size},
                    {"steps", sim.steps}};
    summary.update(result.summary);
    json files = json::array();
    for (const auto& a : result.artifacts) files.push_back(a.filename().string());
    summary["artifacts"] = files;
    const auto file = out_dir / (config.name + "_" + command + "_summary.json");
    write_file(file, summary.dump(2) + "\n");
    result.summary = summary;
    result.artifacts.push_back(file);
    return result;
}

RunResult run_report(const std::vector<std::filesystem::path>& summaries, const RunOptions& options) {
    if (summaries.empty()) throw ValidationError("report needs at least one summary file");
    json scenarios = json::array();
    std::string csv = csv_header({"scenario", "command", "seed", "paths", "steps", "mode", "t_star",
                                  "fraction_condition", "fraction_outperform", "fraction_certified"});
    for (const auto& file : summaries) {
        const std::string where = "summary '" + file.string() + "'";
        std::ifstream is(file);
        if (!is) throw ValidationError("cannot read " + where);
        json s;
        try {
            s = json::parse(is);
        } catch (const json::parse_error& e) {
            throw ValidationError(where + " is not valid JSON: " + e.what());
        }
        try {
            const std::string name = s.at("config").at("name").get<std::string>();
            const std::string command = s.at("command").get<std::string>();
            const auto seed = s.at("seed").get<std::uint64_t>();
            const auto paths = s.at("paths").get<std::size_t>();
            const auto steps = s.at("steps").get<std::size_t>();
            json entry = {{"file", file.filename().string()},
                          {"scenario", name},
                          {"command", command},
                          {"seed", seed},
                          {"paths", paths},
                          {"steps", steps}};
            const std::string prefix = name + ',' + command + ',' + std::to_string(seed) + ',' +
                                       std::to_string(paths) + ',' + std::to_string(steps) + ',';
            if (s.contains("outperformance")) {
                entry["outperformance"] = s.at("outperformance");
                for (const auto& r : s.at("outperformance"))
                    csv += prefix + r.at("mode").get<std::string>() + ',' +
                           format_number(r.at("t_star").get<double>()) + ',' +
                           format_number(r.at("fraction_condition").get<double>()) + ',' +
                           format_number(r.at("fraction_outperform").get<double>()) + ',' +
                           format_number(r.at("fraction_certified").get<double>()) + '\n';
            }
            for (const char* key : {"residuals", "supermartingale", "variation", "quadratic_variation"})
                if (s.contains(key)) entry[key] = s.at(key);
            scenarios.push_back(entry);
        } catch (const json::exception& e) {
            throw ValidationError(where + " is malformed: " + e.what());
        }
    }

    // Pooled fractions per (mode, t_star) across all inputs, weighted by path count.
    std::map<std::pair<std::string, double>, std::array<double, 3>> pooled;
    for (const auto& e : scenarios) {
        if (!e.contains("outperformance")) continue;
        const double n = e.at("paths").get<double>();
        for (const auto& r : e.at("outperformance")) {
            auto& acc = pooled[{r.at("mode").get<std::string>(), r.at("t_star").get<double>()}];
            acc[0] += n;
            acc[1] += n * r.at("fraction_condition").get<double>();
            acc[2] += n * r.at("fraction_outperform").get<double>();
        }
    }
    json combined = json::array();
    for (const auto& [key, acc] : pooled)
        combined.push_back({{"mode", key.first},
                            {"t_star", key.second},
                            {"paths", acc[0]},
                            {"fraction_condition", acc[1] / acc[0]},
                            {"fraction_outperform", acc[2] / acc[0]}});

    const std::filesystem::path out_dir = resolve_out_dir(options.out_dir);
    std::filesystem::create_directories(out_dir);
    RunResult out;
    out.summary = {{"command", "report"}, {"scenarios", scenarios}, {"pooled_outperformance", combined}};
    const auto json_file = out_dir / "report.json";
    const auto csv_file = out_dir / "report.csv";
    write_file(json_file, out.summary.dump(2) + "\n");
    write_file(csv_file, csv);
    out.artifacts = {json_file, csv_file};
    return out;
}

}  // namespace fgen
