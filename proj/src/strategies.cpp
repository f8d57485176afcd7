#include "fgen/strategies.hpp"

#include "fgen/path_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fgen {

namespace {

void require_grid(const VectorSeries& holdings, const MarketPath& path) {
    if (holdings.length() != path.length() || holdings.dim() != path.dim())
        throw std::invalid_argument("grid mismatch: holdings and path shapes differ");
}

}  // namespace

std::string to_string(StrategyMode mode) {
    switch (mode) {
        case StrategyMode::raw_integrand: return "raw_integrand";
        case StrategyMode::additive: return "additive";
        case StrategyMode::multiplicative: return "multiplicative";
    }
    return "unknown";
}

Series strategy_value(const VectorSeries& holdings, const MarketPath& path) {
    require_grid(holdings, path);
    Series v(path.length());
    for (std::size_t n = 0; n < path.length(); ++n) {
        double s = 0.0;
        for (std::size_t i = 0; i < path.dim(); ++i) s += holdings(n, i) * path.weights()(n, i);
        v[n] = s;
    }
    return v;
}

Series defect_q(const VectorSeries& theta, const MarketPath& path) {
    const Series v = strategy_value(theta, path);
    const Series gains = left_riemann_integral(theta, path.weights());
    Series q(path.length());
    for (std::size_t n = 0; n < q.size(); ++n) q[n] = v[n] - v[0] - gains[n];
    return q;
}

StrategySeries make_self_financing(const VectorSeries& theta, double C, const MarketPath& path) {
    const Series q = defect_q(theta, path);
    StrategySeries s;
    s.mode = StrategyMode::raw_integrand;
    s.holdings = VectorSeries(path.length(), path.dim());
    for (std::size_t n = 0; n < path.length(); ++n)
        for (std::size_t i = 0; i < path.dim(); ++i) s.holdings(n, i) = theta(n, i) - q[n] + C;
    s.value = strategy_value(s.holdings, path);
    return s;
}

StrategySeries additive_generate(const GeneratingFunction& G, const MarketPath& path) {
    const PathEvaluation eval = evaluate_along(G, path);
    const GammaSeries gamma = gamma_by_definition(eval, path);
    const auto& w = path.weights();
    StrategySeries s;
    s.mode = StrategyMode::additive;
    s.gamma = gamma.values;
    s.holdings = VectorSeries(path.length(), path.dim());
    for (std::size_t n = 0; n < path.length(); ++n) {
        double avg = 0.0;
        for (std::size_t j = 0; j < path.dim(); ++j) avg += w(n, j) * eval.dg(n, j);
        const double level = s.gamma[n] + eval.g[n] - avg;
        for (std::size_t i = 0; i < path.dim(); ++i) s.holdings(n, i) = eval.dg(n, i) + level;
    }
    s.value = strategy_value(s.holdings, path);
    return s;
}

StrategySeries multiplicative_generate(const GeneratingFunction& G, const MarketPath& path) {
    const PathEvaluation eval = evaluate_along(G, path);
    for (std::size_t n = 0; n < path.length(); ++n)
        if (!(eval.g[n] > 0.0))
            throw NumericalError(G.name() + ": G(mu) <= 0 in multiplicative generation", n);
    const GammaSeries gamma = gamma_by_definition(eval, path);
    const auto& w = path.weights();
    const std::size_t len = path.length();
    StrategySeries s;
    s.mode = StrategyMode::multiplicative;
    s.gamma = gamma.values;
    s.holdings = VectorSeries(len, path.dim());
    s.value.assign(len, 0.0);
    s.growth.assign(len, 1.0);
    s.master_residual.assign(len, 0.0);

    s.value[0] = eval.g[0];
    double exponent = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
        double avg = 0.0;
        for (std::size_t j = 0; j < path.dim(); ++j) avg += w(n, j) * eval.dg(n, j);
        for (std::size_t i = 0; i < path.dim(); ++i)
            s.holdings(n, i) = s.value[n] * (1.0 + (eval.dg(n, i) - avg) / eval.g[n]);
        if (n + 1 < len) {
            double gain = 0.0;
            for (std::size_t i = 0; i < path.dim(); ++i) gain += s.holdings(n, i) * (w(n + 1, i) - w(n, i));
            s.value[n + 1] = s.value[n] + gain;
            exponent += (s.gamma[n + 1] - s.gamma[n]) / eval.g[n];
            s.growth[n + 1] = std::exp(exponent);
        }
        s.master_residual[n] = std::abs(s.value[n] - eval.g[n] * s.growth[n]) / std::abs(s.value[n]);
    }
    return s;
}

VectorSeries portfolio_weights(const StrategySeries& s, const MarketPath& path) {
    require_grid(s.holdings, path);
    VectorSeries pi(path.length(), path.dim());
    for (std::size_t n = 0; n < path.length(); ++n) {
        if (s.value[n] == 0.0) throw NumericalError("portfolio weights undefined: V = 0", n);
        for (std::size_t i = 0; i < path.dim(); ++i)
            pi(n, i) = path.weights()(n, i) * s.holdings(n, i) / s.value[n];
    }
    return pi;
}

NumeraireReport numeraire_invariance_check(const StrategySeries& s, const VectorSeries& caps) {
    if (caps.length() != s.holdings.length() || caps.dim() != s.holdings.dim())
        throw std::invalid_argument("grid mismatch: caps and holdings shapes differ");
    NumeraireReport r;
    const std::size_t len = caps.length();
    Series dollar(len);
    for (std::size_t n = 0; n < len; ++n) {
        double total = 0.0, v = 0.0;
        for (std::size_t i = 0; i < caps.dim(); ++i) {
            total += caps(n, i);
            v += s.holdings(n, i) * caps(n, i);
        }
        dollar[n] = v;
        r.value_identity_residual =
            std::max(r.value_identity_residual, std::abs(v - total * s.value[n]) / total);
    }
    const Series gains = left_riemann_integral(s.holdings, caps);
    for (std::size_t n = 0; n < len; ++n) {
        double total = 0.0;
        for (std::size_t i = 0; i < caps.dim(); ++i) total += caps(n, i);
        r.self_financing_residual =
            std::max(r.self_financing_residual, std::abs(dollar[n] - dollar[0] - gains[n]) / total);
    }
    return r;
}

}  // namespace fgen
