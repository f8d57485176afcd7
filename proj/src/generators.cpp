#include "fgen/generators.hpp"

#include "fgen/path_core.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fgen {

namespace {

bool on_boundary(double v) { return v <= 0.0 || v >= 1.0; }

// Coordinates with x_i in {0, 1} get sum_{j : x_j in (0,1)} x_j D_j G(x), the
// selection under which nonnegative concave functions generate long-only
// strategies.
void substitute_boundary(std::span<const double> x, std::vector<double>& dg) {
    double inner = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (on_boundary(x[j])) {
            any = true;
            continue;
        }
        inner += x[j] * dg[j];
    }
    if (!any) return;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (on_boundary(x[j])) dg[j] = inner;
}

std::vector<double> rank_sum_gradient(std::span<const double> x, std::size_t from, std::size_t to) {
    const RankedPoint r = rank_point(x);
    std::vector<double> dg(x.size(), 0.0);
    for (std::size_t l = from; l < to; ++l)
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] == r.ranked[l]) dg[i] += 1.0 / static_cast<double>(r.tie_counts[l]);
    return dg;
}

double rank_sum(std::span<const double> x, std::size_t from, std::size_t to) {
    const RankedPoint r = rank_point(x);
    double s = 0.0;
    for (std::size_t l = from; l < to; ++l) s += r.ranked[l];
    return s;
}

std::vector<double> uniform_simplex_point(std::mt19937_64& engine, std::size_t d) {
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> x(d);
    double total = 0.0;
    for (double& v : x) total += (v = exp1(engine));
    for (double& v : x) v /= total;
    return x;
}

}  // namespace

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::entropy: return "entropy";
        case GeneratorKind::quadratic: return "quadratic";
        case GeneratorKind::gini: return "gini";
        case GeneratorKind::large_cap: return "large_cap";
        case GeneratorKind::small_cap: return "small_cap";
        case GeneratorKind::geometric_mean: return "geometric_mean";
        case GeneratorKind::custom: return "custom";
    }
    return "unknown";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
    for (auto k : {GeneratorKind::entropy, GeneratorKind::quadratic, GeneratorKind::gini,
                   GeneratorKind::large_cap, GeneratorKind::small_cap, GeneratorKind::geometric_mean})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown generator kind '" + name + "'");
}

std::string to_string(GammaMethod method) {
    return method == GammaMethod::analytic ? "analytic" : "by_definition";
}

GeneratingFunction GeneratingFunction::builtin(GeneratorKind kind, GeneratorParams params) {
    if (kind == GeneratorKind::custom)
        throw ValidationError("custom functions are built with custom_concave");
    if (!std::isfinite(params.c)) throw ValidationError("quadratic shift c must be finite");
    if ((kind == GeneratorKind::large_cap || kind == GeneratorKind::small_cap) && params.m < 1)
        throw ValidationError("rank split m must satisfy 1 <= m <= d-1");
    GeneratingFunction g;
    g.kind_ = kind;
    g.params_ = params;
    g.name_ = to_string(kind);
    return g;
}

GeneratingFunction GeneratingFunction::custom_concave(ValueMap value, GradientMap gradient,
                                                      std::size_t dim, std::uint64_t seed,
                                                      std::size_t samples, std::string name) {
    if (!value || !gradient) throw ValidationError("custom function needs both maps");
    if (dim < 2) throw ValidationError("custom function needs d >= 2");
    std::mt19937_64 engine(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        const auto x = uniform_simplex_point(engine, dim);
        const auto y = uniform_simplex_point(engine, dim);
        const auto xi = gradient(x);
        if (xi.size() != dim) throw ValidationError("supergradient has the wrong dimension");
        double lin = 0.0;
        for (std::size_t i = 0; i < dim; ++i) lin += xi[i] * (y[i] - x[i]);
        const double lhs = value(y) - value(x);
        if (!(lhs <= lin + 1e-9)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "supergradient inequality violated for '" << name << "': G(y)-G(x) = " << lhs
                << " > <xi, y-x> = " << lin << " at sample " << s;
            throw ValidationError(msg.str());
        }
    }
    GeneratingFunction g;
    g.kind_ = GeneratorKind::custom;
    g.name_ = std::move(name);
    g.dim_ = dim;
    g.custom_value_ = std::move(value);
    g.custom_gradient_ = std::move(gradient);
    return g;
}

void GeneratingFunction::check_dim(std::span<const double> x) const {
    if (x.size() < 2) throw std::invalid_argument("generating functions need d >= 2");
    if (dim_ != 0 && x.size() != dim_)
        throw std::invalid_argument("point dimension does not match the custom function");
    if (rank_based() && params_.m >= x.size())
        throw ValidationError("rank split m must satisfy 1 <= m <= d-1");
}

double GeneratingFunction::base_value(std::span<const double> x) const {
    const std::size_t d = x.size();
    switch (kind_) {
        case GeneratorKind::entropy: {
            double h = 0.0;
            for (double v : x)
                if (v > 0.0) h -= v * std::log(v);
            return h;
        }
        case GeneratorKind::quadratic: {
            double s = 0.0;
            for (double v : x) s += v * v;
            return params_.c - s;
        }
        case GeneratorKind::gini: {
            const double a = 1.0 / static_cast<double>(d);
            double s = 0.0;
            for (double v : x) s += std::abs(v - a);
            return 1.0 - 0.5 * s;
        }
        case GeneratorKind::large_cap: return rank_sum(x, 0, params_.m);
        case GeneratorKind::small_cap: return rank_sum(x, params_.m, d);
        case GeneratorKind::geometric_mean: {
            double log_sum = 0.0;
            for (double v : x) {
                if (v <= 0.0) return 0.0;
                log_sum += std::log(v);
            }
            return std::exp(log_sum / static_cast<double>(d));
        }
        case GeneratorKind::custom: return custom_value_(x);
    }
    throw std::logic_error("unreachable generator kind");
}

std::vector<double> GeneratingFunction::base_gradient(std::span<const double> x) const {
    const std::size_t d = x.size();
    std::vector<double> dg(d);
    switch (kind_) {
        case GeneratorKind::entropy:
            for (std::size_t i = 0; i < d; ++i) dg[i] = on_boundary(x[i]) ? 0.0 : -(1.0 + std::log(x[i]));
            substitute_boundary(x, dg);
            return dg;
        case GeneratorKind::quadratic:
            for (std::size_t i = 0; i < d; ++i) dg[i] = -2.0 * x[i];
            substitute_boundary(x, dg);
            return dg;
        case GeneratorKind::gini: {
            const double a = 1.0 / static_cast<double>(d);
            for (std::size_t i = 0; i < d; ++i) dg[i] = x[i] - a > 0.0 ? -0.5 : 0.5;
            return dg;
        }
        case GeneratorKind::large_cap: return rank_sum_gradient(x, 0, params_.m);
        case GeneratorKind::small_cap: return rank_sum_gradient(x, params_.m, d);
        case GeneratorKind::geometric_mean: {
            const double g = base_value(x);
            for (std::size_t i = 0; i < d; ++i) dg[i] = g / (static_cast<double>(d) * x[i]);
            return dg;
        }
        case GeneratorKind::custom: return custom_gradient_(x);
    }
    throw std::logic_error("unreachable generator kind");
}

double GeneratingFunction::value(std::span<const double> x) const {
    check_dim(x);
    double v = base_value(x);
    for (const Stage& s : stages_) v = (v * s.mul + s.add) / s.div;
    return v;
}

std::vector<double> GeneratingFunction::gradient(std::span<const double> x) const {
    check_dim(x);
    std::vector<double> dg = alt_gradient_ ? alt_gradient_(x) : base_gradient(x);
    if (dg.size() != x.size()) throw std::invalid_argument("gradient has the wrong dimension");
    if (alt_gradient_) return dg;  // the replacement already refers to the full function
    for (const Stage& s : stages_)
        for (double& v : dg) v = v * s.mul / s.div;
    return dg;
}

double GeneratingFunction::factor() const noexcept {
    double f = 1.0;
    for (const Stage& s : stages_) f = f * s.mul / s.div;
    return f;
}

std::optional<double> GeneratingFunction::known_supremum(std::size_t d) const {
    const double dd = static_cast<double>(d);
    std::optional<double> sup;
    switch (kind_) {
        case GeneratorKind::entropy: sup = std::log(dd); break;
        case GeneratorKind::quadratic: sup = params_.c - 1.0 / dd; break;
        case GeneratorKind::gini: sup = 1.0; break;
        case GeneratorKind::large_cap: sup = 1.0; break;
        case GeneratorKind::small_cap: sup = (dd - static_cast<double>(params_.m)) / dd; break;
        case GeneratorKind::geometric_mean: sup = 1.0 / dd; break;
        case GeneratorKind::custom: return std::nullopt;
    }
    for (const Stage& s : stages_) {
        if (!(s.mul / s.div >= 0.0)) return std::nullopt;  // a decreasing map turns sup into inf
        *sup = (*sup * s.mul + s.add) / s.div;
    }
    return sup;
}

GeneratingFunction GeneratingFunction::affine(double a, double b) const {
    if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("affine coefficients must be finite");
    if (alt_gradient_) throw std::logic_error("transform before replacing the gradient");
    GeneratingFunction g = *this;
    g.stages_.push_back({a, b, 1.0});
    return g;
}

GeneratingFunction GeneratingFunction::divided_by(double divisor) const {
    if (!(divisor != 0.0) || !std::isfinite(divisor)) throw ValidationError("divisor must be finite and nonzero");
    if (alt_gradient_) throw std::logic_error("transform before replacing the gradient");
    GeneratingFunction g = *this;
    g.stages_.push_back({1.0, 0.0, divisor});
    return g;
}

GeneratingFunction GeneratingFunction::with_gradient(GradientMap alt) const {
    if (!alt) throw std::invalid_argument("gradient map is empty");
    GeneratingFunction g = *this;
    g.alt_gradient_ = std::move(alt);
    g.name_ += "+alt";
    return g;
}

PathEvaluation evaluate_along(const GeneratingFunction& G, const MarketPath& path) {
    PathEvaluation out{Series(path.length()), VectorSeries(path.length(), path.dim())};
    for (std::size_t n = 0; n < path.length(); ++n) {
        const auto x = path.weights_at(n);
        out.g[n] = G.value(x);
        if (!std::isfinite(out.g[n]))
            throw NumericalError(G.name() + ": G is not finite", n);
        const auto dg = G.gradient(x);
        for (std::size_t i = 0; i < dg.size(); ++i) {
            if (!std::isfinite(dg[i]))
                throw NumericalError(G.name() + ": DG is not finite in component " + std::to_string(i + 1), n);
            out.dg(n, i) = dg[i];
        }
    }
    return out;
}

GammaSeries gamma_by_definition(const PathEvaluation& eval, const MarketPath& path) {
    if (eval.g.size() != path.length() || eval.dg.length() != path.length())
        throw std::invalid_argument("grid mismatch: evaluation and path lengths differ");
    const auto& w = path.weights();
    GammaSeries out{Series(path.length(), 0.0), GammaMethod::by_definition};
    double gains = 0.0;
    for (std::size_t n = 1; n < path.length(); ++n) {
        double step = 0.0;
        for (std::size_t i = 0; i < path.dim(); ++i) step += eval.dg(n - 1, i) * (w(n, i) - w(n - 1, i));
        gains += step;
        out.values[n] = eval.g[0] - eval.g[n] + gains;
    }
    return out;
}

GammaSeries gamma_by_definition(const GeneratingFunction& G, const MarketPath& path) {
    return gamma_by_definition(evaluate_along(G, path), path);
}

GammaSeries gamma_analytic(const GeneratingFunction& G, const MarketPath& path) {
    if (!G.has_analytic_gamma())
        throw std::invalid_argument("no analytic Gamma recipe for '" + G.name() + "'");
    const auto& w = path.weights();
    const std::size_t d = path.dim();
    const std::size_t len = path.length();
    GammaSeries out{Series(len, 0.0), GammaMethod::analytic};
    Series& gamma = out.values;

    switch (G.kind()) {
        case GeneratorKind::entropy:
            for (std::size_t m = 0; m + 1 < len; ++m) {
                double step = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    if (!(w(m, i) > 0.0)) continue;
                    const double dx = w(m + 1, i) - w(m, i);
                    step += dx * dx / w(m, i);
                }
                gamma[m + 1] = gamma[m] + 0.5 * step;
            }
            break;
        case GeneratorKind::quadratic:
            for (std::size_t i = 0; i < d; ++i) {
                const Series col = w.column(i);
                const Series qv = quadratic_covariation(col, col);
                for (std::size_t n = 0; n < len; ++n) gamma[n] += qv[n];
            }
            break;
        case GeneratorKind::gini: {
            const double a = 1.0 / static_cast<double>(d);
            for (std::size_t i = 0; i < d; ++i) {
                const Series col = w.column(i);
                const auto lt = local_time(col, a);
                for (std::size_t n = 0; n < len; ++n) gamma[n] += 0.5 * lt.values[n];
            }
            break;
        }
        case GeneratorKind::large_cap:
        case GeneratorKind::small_cap: {
            const std::size_t m = G.params().m;
            if (m < 1 || m >= d) throw ValidationError("rank split m must satisfy 1 <= m <= d-1");
            const auto lt = collision_local_time(rank_with_ties(w), m - 1, m);
            const double sign = G.kind() == GeneratorKind::large_cap ? -0.5 : 0.5;
            for (std::size_t n = 0; n < len; ++n) gamma[n] = sign * lt.values[n];
            break;
        }
        case GeneratorKind::geometric_mean: {
            const GeneratingFunction base = GeneratingFunction::builtin(GeneratorKind::geometric_mean);
            const double dd = static_cast<double>(d);
            for (std::size_t m = 0; m + 1 < len; ++m) {
                const double g = base.value(w.row(m));
                double quad = 0.0;  // sum_ij D_ij G dx_i dx_j
                double lin = 0.0;
                double diag = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double r = (w(m + 1, i) - w(m, i)) / w(m, i);
                    lin += r;
                    diag += r * r;
                }
                quad = g * (lin * lin / (dd * dd) - diag / dd);
                gamma[m + 1] = gamma[m] - 0.5 * quad;
            }
            break;
        }
        case GeneratorKind::custom: break;
    }
    const double f = G.factor();
    if (f != 1.0)
        for (double& v : gamma) v *= f;
    return out;
}

GeneratingFunction normalize(const GeneratingFunction& G, std::span<const double> mu0) {
    const double g0 = G.value(mu0);
    if (!std::isfinite(g0)) throw ValidationError("G(mu0) is not finite");
    if (g0 < 0.0) throw ValidationError("cannot normalize: G(mu0) < 0");
    if (g0 == 0.0) return G.affine(1.0, 1.0);
    return G.divided_by(g0);
}

}  // namespace fgen
