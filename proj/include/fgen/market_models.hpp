#pragma once

#include "fgen/types.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fgen {

enum class ModelKind {
    gbm,                       // independent geometric Brownian capitalizations
    two_asset_martingale,      // d = 2, dmu = sigma mu (1 - mu) dW
    rank_atlas,                // log-caps with rank-dependent drift, smallest pushed up
    absorbed_brownian_pair,    // d = 2, mu_1 = B/2, B stopped at {0, 2}
    oscillator_counterexample  // deterministic finite-variation oscillator
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelSpec {
    ModelKind kind = ModelKind::gbm;
    std::vector<double> initial_caps{1.0, 1.0};
    std::vector<double> drifts;        // gbm: per asset, empty means all zero
    std::vector<double> volatilities;  // gbm: per asset, empty means all `volatility`
    double volatility = 0.2;           // common volatility for the other kinds
    double atlas_drift = 0.1;          // rank_atlas: g > 0
    std::size_t oscillator_n_max = 100;

    std::size_t dim() const noexcept { return initial_caps.size(); }
    void validate() const;
};

struct SimConfig {
    double horizon = 1.0;
    std::size_t steps = 1024;
    std::uint64_t seed = 0;
    std::size_t ensemble_size = 1;
    /// Number of fine Brownian increments the path's noise is built from; the
    /// increments of a coarse step are sums of fine ones, so two configs with
    /// the same seed and noise_resolution sample the same Brownian path. 0
    /// means `steps`. Must be a multiple of `steps`.
    std::size_t noise_resolution = 0;

    std::size_t effective_noise_resolution() const noexcept {
        return noise_resolution == 0 ? steps : noise_resolution;
    }
    void validate() const;
};

/// Path `path_index` of the ensemble described by (spec, config). Bit-identical
/// for identical inputs; streams are derived from (seed, path_index) only.
MarketPath simulate(const ModelSpec& spec, const SimConfig& config, std::size_t path_index);

/// All `config.ensemble_size` paths, computed on up to `threads` workers.
std::vector<MarketPath> simulate_ensemble(const ModelSpec& spec, const SimConfig& config,
                                          unsigned threads = 1);

/// Smallest odd integer in [sqrt(n), 3 sqrt(n)).
std::size_t oscillation_count(std::size_t n);

struct OscillatorPath {
    std::vector<double> times;
    Series values;
};

/// Piecewise-linear path with X(1 - 1/n) = 1/n and oscillation_count(n) monotone
/// legs between 1/n and 1/(n+1) on [1 - 1/n, 1 - 1/(n+1)], for n = 1..n_max.
/// Sampled at every extremum.
OscillatorPath oscillator_path(std::size_t n_max);

/// Stateless stream derivation used by the simulators: a 64-bit key from
/// (seed, stream index).
std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t stream);

}  // namespace fgen
