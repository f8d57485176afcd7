#include "fgen/fgen.h"

#include "fgen/diagnostics.hpp"
#include "fgen/generators.hpp"
#include "fgen/market_models.hpp"
#include "fgen/scenario.hpp"
#include "fgen/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

struct fgen_path {
    fgen::MarketPath path;
};

struct fgen_generator {
    fgen::GeneratingFunction g;
};

struct fgen_strategy {
    fgen::StrategySeries s;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_artifacts;

fgen_status fail(fgen_status code, const std::string& message) {
    last_error = message;
    return code;
}

template <typename Fn>
fgen_status guarded(Fn&& fn) {
    try {
        fn();
        return FGEN_OK;
    } catch (const fgen::ValidationError& e) {
        return fail(FGEN_ERR_VALIDATION, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(FGEN_ERR_VALIDATION, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(FGEN_ERR_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(FGEN_ERR_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(FGEN_ERR_RUNTIME, e.what());
    } catch (...) {
        return fail(FGEN_ERR_RUNTIME, "unknown error");
    }
}

void require(const void* p, const char* what) {
    if (!p) throw std::invalid_argument(std::string(what) + " is null");
}

void copy_out(const std::vector<double>& v, double* out) { std::copy(v.begin(), v.end(), out); }

}  // namespace

extern "C" {

const char* fgen_last_error(void) { return last_error.c_str(); }

const char* fgen_version(void) { return "0.1.0"; }

fgen_status fgen_path_from_caps(const double* times, size_t len, const double* caps, size_t d, fgen_path** out) {
    return guarded([&] {
        require(times, "times");
        require(caps, "caps");
        require(out, "out");
        fgen::VectorSeries s(len, d);
        std::copy(caps, caps + len * d, s.row(0).data());
        auto path = fgen::MarketPath::from_caps(fgen::TimeGrid(std::vector<double>(times, times + len)), std::move(s));
        *out = new fgen_path{std::move(path)};
    });
}

fgen_status fgen_path_simulate(const char* config_json, size_t path_index, fgen_path** out) {
    return guarded([&] {
        require(config_json, "config_json");
        require(out, "out");
        const auto config = fgen::parse_scenario(nlohmann::json::parse(config_json));
        *out = new fgen_path{fgen::simulate(config.model, config.simulation, path_index)};
    });
}

void fgen_path_free(fgen_path* path) { delete path; }

size_t fgen_path_length(const fgen_path* path) { return path ? path->path.length() : 0; }

size_t fgen_path_dim(const fgen_path* path) { return path ? path->path.dim() : 0; }

fgen_status fgen_path_times(const fgen_path* path, double* out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        copy_out(path->path.grid().times(), out);
    });
}

fgen_status fgen_path_weights(const fgen_path* path, double* out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        copy_out(path->path.weights().data(), out);
    });
}

fgen_status fgen_path_caps(const fgen_path* path, double* out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        copy_out(path->path.caps().data(), out);
    });
}

fgen_status fgen_generator_builtin(const char* kind, double c, size_t m, fgen_generator** out) {
    return guarded([&] {
        require(kind, "kind");
        require(out, "out");
        fgen::GeneratorParams params;
        params.c = c;
        params.m = m;
        *out = new fgen_generator{fgen::GeneratingFunction::builtin(fgen::generator_kind_from_string(kind), params)};
    });
}

fgen_status fgen_generator_normalize(const fgen_generator* g, const double* mu0, size_t d, fgen_generator** out) {
    return guarded([&] {
        require(g, "generator");
        require(mu0, "mu0");
        require(out, "out");
        *out = new fgen_generator{fgen::normalize(g->g, std::span<const double>(mu0, d))};
    });
}

void fgen_generator_free(fgen_generator* g) { delete g; }

fgen_status fgen_generator_value(const fgen_generator* g, const double* x, size_t d, double* out) {
    return guarded([&] {
        require(g, "generator");
        require(x, "x");
        require(out, "out");
        *out = g->g.value(std::span<const double>(x, d));
    });
}

fgen_status fgen_generator_gradient(const fgen_generator* g, const double* x, size_t d, double* out) {
    return guarded([&] {
        require(g, "generator");
        require(x, "x");
        require(out, "out");
        copy_out(g->g.gradient(std::span<const double>(x, d)), out);
    });
}

fgen_status fgen_gamma(const fgen_generator* g, const fgen_path* path, int analytic, double* out) {
    return guarded([&] {
        require(g, "generator");
        require(path, "path");
        require(out, "out");
        const auto gamma = analytic ? fgen::gamma_analytic(g->g, path->path) : fgen::gamma_by_definition(g->g, path->path);
        copy_out(gamma.values, out);
    });
}

fgen_status fgen_strategy_generate(const fgen_generator* g, const fgen_path* path, fgen_mode mode,
                                   fgen_strategy** out) {
    return guarded([&] {
        require(g, "generator");
        require(path, "path");
        require(out, "out");
        switch (mode) {
            case FGEN_MODE_ADDITIVE: *out = new fgen_strategy{fgen::additive_generate(g->g, path->path)}; return;
            case FGEN_MODE_MULTIPLICATIVE:
                *out = new fgen_strategy{fgen::multiplicative_generate(g->g, path->path)};
                return;
        }
        throw std::invalid_argument("unknown generation mode");
    });
}

void fgen_strategy_free(fgen_strategy* s) { delete s; }

size_t fgen_strategy_length(const fgen_strategy* s) { return s ? s->s.holdings.length() : 0; }

size_t fgen_strategy_dim(const fgen_strategy* s) { return s ? s->s.holdings.dim() : 0; }

fgen_status fgen_strategy_value(const fgen_strategy* s, double* out) {
    return guarded([&] {
        require(s, "strategy");
        require(out, "out");
        copy_out(s->s.value, out);
    });
}

fgen_status fgen_strategy_holdings(const fgen_strategy* s, double* out) {
    return guarded([&] {
        require(s, "strategy");
        require(out, "out");
        copy_out(s->s.holdings.data(), out);
    });
}

fgen_status fgen_strategy_gamma(const fgen_strategy* s, double* out) {
    return guarded([&] {
        require(s, "strategy");
        require(out, "out");
        copy_out(s->s.gamma, out);
    });
}

fgen_status fgen_strategy_master_residual(const fgen_strategy* s, double* out) {
    return guarded([&] {
        require(s, "strategy");
        require(out, "out");
        if (s->s.mode != fgen::StrategyMode::multiplicative)
            throw std::invalid_argument("master residual exists for multiplicative strategies only");
        copy_out(s->s.master_residual, out);
    });
}

fgen_status fgen_find_shift_c(double kappa, double epsilon, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = fgen::find_shift_c(kappa, epsilon);
    });
}

fgen_status fgen_horizon_bound(const char* kind, const double* mu0, size_t d, double eta, double diversity,
                               double* out) {
    return guarded([&] {
        require(kind, "kind");
        require(mu0, "mu0");
        require(out, "out");
        std::optional<double> delta;
        if (diversity > 0.0) delta = diversity;
        *out = fgen::horizon_bound(fgen::generator_kind_from_string(kind), std::span<const double>(mu0, d), eta,
                                   delta);
    });
}

fgen_status fgen_run_command(const char* command, const char* config_file, const char* out_dir,
                             const uint64_t* seed_override, unsigned threads) {
    return guarded([&] {
        require(command, "command");
        require(config_file, "config_file");
        fgen::RunOptions options;
        if (out_dir) options.out_dir = out_dir;
        if (seed_override) options.seed_override = *seed_override;
        options.threads = std::max(1u, threads);
        const auto result = fgen::run_command(command, fgen::load_scenario(config_file), options);
        last_artifacts.clear();
        for (const auto& a : result.artifacts) last_artifacts += a.string() + "\n";
    });
}

fgen_status fgen_run_report(const char* const* summary_files, size_t count, const char* out_dir) {
    return guarded([&] {
        if (count > 0) require(summary_files, "summary_files");
        std::vector<std::filesystem::path> files;
        for (size_t k = 0; k < count; ++k) {
            require(summary_files[k], "summary file name");
            files.emplace_back(summary_files[k]);
        }
        fgen::RunOptions options;
        if (out_dir) options.out_dir = out_dir;
        const auto result = fgen::run_report(files, options);
        last_artifacts.clear();
        for (const auto& a : result.artifacts) last_artifacts += a.string() + "\n";
    });
}

const char* fgen_last_artifacts(void) { return last_artifacts.c_str(); }

}  // extern "C"
