#pragma once

// Outperformance checks, the multiplicative shift constant, Monte Carlo
// supermartingale tests and counterexample reports.

#include "fgen/generators.hpp"
#include "fgen/market_models.hpp"
#include "fgen/strategies.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace fgen {

struct PathOutcome {
    double gamma_at_t_star = 0.0;  // Gamma^G(T*) of the (normalized) generating function
    bool condition = false;        // additive: Gamma(T*) > 1; multiplicative: Gamma(T*) > 1 + eps
    double value_at_t_star = 0.0;
    double final_value = 0.0;
    double min_value = 0.0;        // min_t V(t)
    bool outperforms_at_end = false;  // V(T) > 1
    bool certified = false;        // condition held and the implied outperformance was verified
};

struct OutperformanceReport {
    StrategyMode mode = StrategyMode::additive;
    double t_star = 0.0;
    std::size_t t_star_index = 0;
    // multiplicative only
    double epsilon = 0.0;
    double kappa = 0.0;
    double shift_c = 0.0;
    double value_bound = 0.0;  // (c/(1+c)) exp((1+eps)/(kappa+c))

    std::vector<PathOutcome> paths;
    double fraction_condition = 0.0;
    double fraction_outperform = 0.0;
    double fraction_certified = 0.0;
};

/// Requires G(mu(0)) == 1 on every path (ValidationError otherwise). On every
/// path with Gamma(T*) > 1 verifies V(T) > 1 for all grid T >= T*, throwing
/// std::logic_error if that consequence fails.
OutperformanceReport check_additive_outperformance(const GeneratingFunction& G,
                                                   const std::vector<MarketPath>& paths,
                                                   double t_star, unsigned threads = 1);

/// Smallest c > 0 on the search lattice with (c/(1+c)) exp((1+eps)/(kappa+c)) > 1:
/// doubling search for a passing point, then bisection down to width 1e-6.
double find_shift_c(double kappa, double epsilon);

/// (c/(1+c)) exp((1+eps)/(kappa+c)).
double shift_bound(double c, double kappa, double epsilon);

/// Generates from G^(c) = (G + c)/(1 + c), c = find_shift_c(kappa, eps), where
/// kappa is the closed-form sup of G if known, else 1.001 times the largest
/// value of G visited by the ensemble. On paths with Gamma^G(T*) > 1 + eps
/// verifies G^(c)(mu(T*)) K(T*) > bound (std::logic_error otherwise).
OutperformanceReport check_multiplicative_outperformance(const GeneratingFunction& G,
                                                         const std::vector<MarketPath>& paths,
                                                         double t_star, double epsilon,
                                                         unsigned threads = 1);

/// Horizon beyond which strong outperformance holds given Gamma(t) >= eta t:
/// entropy H(mu0)/eta, quadratic (1 - |mu0|^2)/eta, and with diversity delta
/// (1 - 2 delta (1 - delta) - |mu0|^2)/eta.
double horizon_bound(GeneratorKind kind, std::span<const double> mu0, double eta,
                     std::optional<double> diversity = std::nullopt);

struct CheckpointStat {
    double time = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
};

struct SupermartingaleReport {
    std::vector<CheckpointStat> checkpoints;
    std::vector<double> diff_means;      // paired mean of G(t_{k+1}) - G(t_k)
    std::vector<double> diff_std_errors;
    bool nonincreasing = false;  // every diff mean <= 3 SE
    bool nondecreasing = false;  // every diff mean >= -3 SE
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::size_t steps = 0;
};

/// Monte Carlo means of G(mu(t_k)) at `checkpoints` + 1 equally spaced grid
/// points. The model must have martingale weights (two_asset_martingale or
/// absorbed_brownian_pair). Paths are simulated one at a time, not stored.
SupermartingaleReport supermartingale_mc_test(const GeneratingFunction& G, const ModelSpec& spec,
                                              const SimConfig& config, std::size_t checkpoints = 4,
                                              unsigned threads = 1);

/// max_n |Gamma(t_n) - Gamma_alt(t_n)| with Gamma_alt computed from `alt`.
double gamma_uniqueness_check(const GeneratingFunction& G, const GradientMap& alt,
                              const MarketPath& path);

struct VariationRow {
    std::size_t n_max = 0;
    std::size_t points = 0;
    double tv_x = 0.0;
    double tv_x_bound = 0.0;        // sum_{n<=n_max} 3 sqrt(n)/(n^2+n)
    double tv_sqrt_x = 0.0;
    double tv_sqrt_x_lower = 0.0;   // sum_{n<=n_max} (1 - sqrt(n/(n+1)))
};

struct QuadraticVariationProbe {
    std::size_t paths = 0;
    std::size_t steps = 0;  // coarse mesh; the fine mesh has 4x as many steps
    std::uint64_t seed = 0;
    double fraction_growing = 0.0;  // QV at h/4 > QV at h
    double mean_coarse = 0.0;
    double mean_fine = 0.0;
};

struct VariationReport {
    std::vector<VariationRow> rows;
    double log_slope = 0.0;  // least-squares slope of tv_sqrt_x against log n_max
    std::optional<QuadraticVariationProbe> qv;
};

/// Oscillator total variations for each n_max (must be increasing), plus,
/// when qv_paths > 0, the discrete quadratic variation of sqrt|1 - B| for the
/// absorbed Brownian pair (volatility 1, horizon 1) at two meshes.
VariationReport variation_divergence_report(const std::vector<std::size_t>& n_max_list,
                                            std::size_t qv_paths = 0, std::size_t qv_steps = 256,
                                            std::uint64_t seed = 0, unsigned threads = 1);

}  // namespace fgen
