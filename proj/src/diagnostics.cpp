#include "fgen/diagnostics.hpp"

#include "fgen/path_core.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fgen {

namespace {

std::size_t t_star_index(const MarketPath& path, double t_star) {
    if (!(t_star >= 0.0)) throw ValidationError("t_star must be nonnegative");
    const std::size_t idx = path.grid().index_at_or_after(t_star);
    if (idx >= path.length()) throw ValidationError("t_star lies beyond the simulation horizon");
    return idx;
}

void require_unit_start(const GeneratingFunction& G, const std::vector<MarketPath>& paths) {
    if (paths.empty()) throw ValidationError("outperformance check needs at least one path");
    for (const auto& p : paths) {
        const double g0 = G.value(p.weights_at(0));
        if (!(std::abs(g0 - 1.0) <= 1e-12))
            throw ValidationError("generating function must be normalized: G(mu(0)) = " +
                                  std::to_string(g0) + ", expected 1");
    }
}

void summarize(OutperformanceReport& r) {
    const double n = static_cast<double>(r.paths.size());
    double cond = 0.0, out = 0.0, cert = 0.0;
    for (const auto& p : r.paths) {
        cond += p.condition;
        out += p.outperforms_at_end;
        cert += p.certified;
    }
    r.fraction_condition = cond / n;
    r.fraction_outperform = out / n;
    r.fraction_certified = cert / n;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

OutperformanceReport check_additive_outperformance(const GeneratingFunction& G,
                                                   const std::vector<MarketPath>& paths,
                                                   double t_star, unsigned threads) {
    require_unit_start(G, paths);
    OutperformanceReport r;
    r.mode = StrategyMode::additive;
    r.t_star = t_star;
    r.t_star_index = t_star_index(paths.front(), t_star);
    r.paths.resize(paths.size());
    detail::parallel_for(paths.size(), threads, [&](std::size_t k) {
        const MarketPath& path = paths[k];
        const std::size_t idx = t_star_index(path, t_star);
        const StrategySeries s = additive_generate(G, path);
        PathOutcome& o = r.paths[k];
        o.gamma_at_t_star = s.gamma[idx];
        o.condition = o.gamma_at_t_star > 1.0;
        o.value_at_t_star = s.value[idx];
        o.final_value = s.value.back();
        o.min_value = *std::min_element(s.value.begin(), s.value.end());
        o.outperforms_at_end = o.final_value > 1.0;
        if (o.condition) {
            for (std::size_t n = idx; n < path.length(); ++n) {
                if (!(s.value[n] > 1.0)) {
                    std::ostringstream msg;
                    msg << "additive outperformance failed on path " << k << " at time index " << n
                        << ": Gamma(T*) = " << o.gamma_at_t_star << " but V = " << s.value[n]
                        << " (is G nonnegative and Lyapunov along this path?)";
                    throw std::logic_error(msg.str());
                }
            }
            o.certified = true;
        }
    });
    summarize(r);
    return r;
}

double shift_bound(double c, double kappa, double epsilon) {
    return c / (1.0 + c) * std::exp((1.0 + epsilon) / (kappa + c));
}

double find_shift_c(double kappa, double epsilon) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ValidationError("kappa must be >= 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be > 0");
    auto passes = [&](double c) { return shift_bound(c, kappa, epsilon) > 1.0; };

    double lo = 0.0;  // c = 0 gives 0 on the left-hand side
    double hi = 1.0 / 1024.0;
    while (!passes(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e15) throw std::runtime_error("find_shift_c: no admissible c found");
    }
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? hi : lo) = mid;
    }
    if (!passes(hi)) throw std::logic_error("find_shift_c: returned c violates its inequality");
    return hi;
}

OutperformanceReport check_multiplicative_outperformance(const GeneratingFunction& G,
                                                         const std::vector<MarketPath>& paths,
                                                         double t_star, double epsilon,
                                                         unsigned threads) {
    require_unit_start(G, paths);
    OutperformanceReport r;
    r.mode = StrategyMode::multiplicative;
    r.t_star = t_star;
    r.t_star_index = t_star_index(paths.front(), t_star);
    r.epsilon = epsilon;

    if (auto sup = G.known_supremum(paths.front().dim())) {
        r.kappa = *sup;
    } else {
        double visited = 0.0;
        for (const auto& p : paths)
            for (std::size_t n = 0; n < p.length(); ++n) visited = std::max(visited, G.value(p.weights_at(n)));
        r.kappa = 1.001 * visited;
    }
    r.shift_c = find_shift_c(r.kappa, epsilon);
    r.value_bound = shift_bound(r.shift_c, r.kappa, epsilon);
    const GeneratingFunction shifted = G.affine(1.0, r.shift_c).divided_by(1.0 + r.shift_c);

    r.paths.resize(paths.size());
    detail::parallel_for(paths.size(), threads, [&](std::size_t k) {
        const MarketPath& path = paths[k];
        const std::size_t idx = t_star_index(path, t_star);
        const GammaSeries gamma = gamma_by_definition(G, path);
        const StrategySeries s = multiplicative_generate(shifted, path);
        PathOutcome& o = r.paths[k];
        o.gamma_at_t_star = gamma.values[idx];
        o.condition = o.gamma_at_t_star > 1.0 + epsilon;
        o.value_at_t_star = s.value[idx];
        o.final_value = s.value.back();
        o.min_value = *std::min_element(s.value.begin(), s.value.end());
        o.outperforms_at_end = o.final_value > 1.0;
        if (o.condition) {
            const double master = shifted.value(path.weights_at(idx)) * s.growth[idx];
            if (!(master > r.value_bound)) {
                std::ostringstream msg;
                msg << "multiplicative outperformance bound failed on path " << k
                    << ": G K(T*) = " << master << " <= " << r.value_bound;
                throw std::logic_error(msg.str());
            }
            o.certified = o.value_at_t_star > 1.0;
        }
    });
    summarize(r);
    return r;
}

double horizon_bound(GeneratorKind kind, std::span<const double> mu0, double eta,
                     std::optional<double> diversity) {
    if (!(eta > 0.0)) throw ValidationError("eta must be > 0");
    double sq = 0.0;
    for (double v : mu0) sq += v * v;
    switch (kind) {
        case GeneratorKind::entropy:
            if (diversity) throw ValidationError("diversity refinement applies to the quadratic function only");
            return GeneratingFunction::builtin(GeneratorKind::entropy).value(mu0) / eta;
        case GeneratorKind::quadratic: {
            if (!diversity) return (1.0 - sq) / eta;
            const double d = *diversity;
            if (!(d > 0.0 && d < 1.0)) throw ValidationError("diversity delta must lie in (0, 1)");
            return (1.0 - 2.0 * d * (1.0 - d) - sq) / eta;
        }
        default: break;
    }
    throw ValidationError("no horizon bound for generator kind '" + to_string(kind) + "'");
}

SupermartingaleReport supermartingale_mc_test(const GeneratingFunction& G, const ModelSpec& spec,
                                              const SimConfig& config, std::size_t checkpoints,
                                              unsigned threads) {
    if (spec.kind != ModelKind::two_asset_martingale && spec.kind != ModelKind::absorbed_brownian_pair)
        throw ValidationError("supermartingale test needs a model with martingale weights");
    if (checkpoints < 1 || checkpoints > config.steps)
        throw ValidationError("checkpoints must lie in [1, steps]");
    spec.validate();
    config.validate();

    std::vector<std::size_t> idx(checkpoints + 1);
    for (std::size_t k = 0; k <= checkpoints; ++k) idx[k] = k * config.steps / checkpoints;

    const std::size_t paths = config.ensemble_size;
    std::vector<std::vector<double>> values(checkpoints + 1, std::vector<double>(paths));
    detail::parallel_for(paths, threads, [&](std::size_t p) {
        const MarketPath path = simulate(spec, config, p);
        for (std::size_t k = 0; k <= checkpoints; ++k) values[k][p] = G.value(path.weights_at(idx[k]));
    });

    SupermartingaleReport r;
    r.seed = config.seed;
    r.paths = paths;
    r.steps = config.steps;
    const double h = config.horizon / static_cast<double>(config.steps);
    for (std::size_t k = 0; k <= checkpoints; ++k) {
        const double m = mean_of(values[k]);
        r.checkpoints.push_back({static_cast<double>(idx[k]) * h, m, std_error_of(values[k], m)});
    }
    r.nonincreasing = r.nondecreasing = true;
    for (std::size_t k = 0; k < checkpoints; ++k) {
        std::vector<double> diff(paths);
        for (std::size_t p = 0; p < paths; ++p) diff[p] = values[k + 1][p] - values[k][p];
        const double m = mean_of(diff);
        const double se = std_error_of(diff, m);
        r.diff_means.push_back(m);
        r.diff_std_errors.push_back(se);
        if (m > 3.0 * se) r.nonincreasing = false;
        if (m < -3.0 * se) r.nondecreasing = false;
    }
    return r;
}

double gamma_uniqueness_check(const GeneratingFunction& G, const GradientMap& alt,
                              const MarketPath& path) {
    const Series a = gamma_by_definition(G, path).values;
    const Series b = gamma_by_definition(G.with_gradient(alt), path).values;
    double worst = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) worst = std::max(worst, std::abs(a[n] - b[n]));
    return worst;
}

VariationReport variation_divergence_report(const std::vector<std::size_t>& n_max_list,
                                            std::size_t qv_paths, std::size_t qv_steps,
                                            std::uint64_t seed, unsigned threads) {
    if (n_max_list.empty()) throw ValidationError("n_max list is empty");
    for (std::size_t k = 0; k < n_max_list.size(); ++k) {
        if (n_max_list[k] < 1) throw ValidationError("n_max values must be >= 1");
        if (k > 0 && n_max_list[k] <= n_max_list[k - 1])
            throw ValidationError("n_max values must be increasing");
    }
    VariationReport report;
    for (std::size_t n_max : n_max_list) {
        const OscillatorPath osc = oscillator_path(n_max);
        Series root(osc.values.size());
        std::transform(osc.values.begin(), osc.values.end(), root.begin(),
                       [](double v) { return std::sqrt(v); });
        VariationRow row;
        row.n_max = n_max;
        row.points = osc.values.size();
        row.tv_x = total_variation(osc.values);
        row.tv_sqrt_x = total_variation(root);
        for (std::size_t n = 1; n <= n_max; ++n) {
            const double dn = static_cast<double>(n);
            row.tv_x_bound += 3.0 * std::sqrt(dn) / (dn * dn + dn);
            row.tv_sqrt_x_lower += 1.0 - std::sqrt(dn / (dn + 1.0));
        }
        report.rows.push_back(row);
    }
    if (report.rows.size() >= 2) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (const auto& row : report.rows) {
            const double x = std::log(static_cast<double>(row.n_max));
            sx += x;
            sy += row.tv_sqrt_x;
            sxx += x * x;
            sxy += x * row.tv_sqrt_x;
        }
        const double n = static_cast<double>(report.rows.size());
        report.log_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    if (qv_paths > 0) {
        if (qv_steps < 1) throw ValidationError("qv_steps must be >= 1");
        ModelSpec spec;
        spec.kind = ModelKind::absorbed_brownian_pair;
        spec.initial_caps = {1.0, 1.0};
        spec.volatility = 1.0;
        SimConfig coarse;
        coarse.horizon = 1.0;
        coarse.steps = qv_steps;
        coarse.seed = seed;
        coarse.ensemble_size = qv_paths;
        coarse.noise_resolution = 4 * qv_steps;
        SimConfig fine = coarse;
        fine.steps = 4 * qv_steps;

        auto qv_of = [](const MarketPath& p) {
            double s = 0.0;
            auto f = [&](std::size_t n) { return std::sqrt(std::abs(1.0 - 2.0 * p.weights()(n, 0))); };
            for (std::size_t n = 0; n + 1 < p.length(); ++n) {
                const double dx = f(n + 1) - f(n);
                s += dx * dx;
            }
            return s;
        };
        std::vector<double> qc(qv_paths), qf(qv_paths);
        detail::parallel_for(qv_paths, threads, [&](std::size_t p) {
            qc[p] = qv_of(simulate(spec, coarse, p));
            qf[p] = qv_of(simulate(spec, fine, p));
        });
        QuadraticVariationProbe probe;
        probe.paths = qv_paths;
        probe.steps = qv_steps;
        probe.seed = seed;
        double growing = 0.0;
        for (std::size_t p = 0; p < qv_paths; ++p) growing += qf[p] > qc[p];
        probe.fraction_growing = growing / static_cast<double>(qv_paths);
        probe.mean_coarse = mean_of(qc);
        probe.mean_fine = mean_of(qf);
        report.qv = probe;
    }
    return report;
}

}  // namespace fgen
