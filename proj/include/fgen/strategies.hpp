#pragma once

// Trading strategies in market-weight units: holdings phi_i(t_n) applied over
// [t_n, t_{n+1}), value V(t_n) = sum_i phi_i(t_n) mu_i(t_n).

#include "fgen/generators.hpp"
#include "fgen/types.hpp"

#include <string>

namespace fgen {

enum class StrategyMode { raw_integrand, additive, multiplicative };

std::string to_string(StrategyMode mode);

struct StrategySeries {
    StrategyMode mode = StrategyMode::raw_integrand;
    VectorSeries holdings;
    Series value;
    Series gamma;            // Gamma^G by definition; empty for raw integrands
    Series growth;           // multiplicative: K(t_n) = exp(sum_{m<n} dGamma(t_m) / G(mu(t_m)))
    Series master_residual;  // multiplicative: |V - G K| / |V|
};

/// sum_i theta_i(t_n) mu_i(t_n) at every grid point.
Series strategy_value(const VectorSeries& holdings, const MarketPath& path);

/// Q(t_n) = V(t_n) - V(0) - sum_{m<n} <theta(t_m), dmu(t_m)>.
Series defect_q(const VectorSeries& theta, const MarketPath& path);

/// phi_i = theta_i - Q + C; self-financing by construction.
StrategySeries make_self_financing(const VectorSeries& theta, double C, const MarketPath& path);

/// phi_i = D_iG + Gamma + G - sum_j mu_j D_jG, value G + Gamma.
StrategySeries additive_generate(const GeneratingFunction& G, const MarketPath& path);

/// V(0) = G(mu(0)), psi_i = V (1 + (D_iG - sum_j mu_j D_jG) / G), and
/// V(t_{n+1}) = V(t_n) + <psi(t_n), dmu(t_n)>. Throws NumericalError where
/// G(mu) <= 0.
StrategySeries multiplicative_generate(const GeneratingFunction& G, const MarketPath& path);

/// pi_i = mu_i phi_i / V. Throws NumericalError where V == 0.
VectorSeries portfolio_weights(const StrategySeries& s, const MarketPath& path);

struct NumeraireReport {
    double value_identity_residual = 0.0;  // max_n |sum_i phi_i S_i - Sigma V| / Sigma
    double self_financing_residual = 0.0;  // max_n |V_S(t_n) - V_S(0) - sum <phi, dS>| / Sigma(t_n)
};

/// Dollar-denominated view of a strategy given the capitalizations it was built on.
NumeraireReport numeraire_invariance_check(const StrategySeries& s, const VectorSeries& caps);

}  // namespace fgen
