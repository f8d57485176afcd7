#include "fgen/market_models.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

namespace fgen {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Brownian increments on the coarse grid, aggregated from a fixed fine
// resolution so that refinements of the same (seed, path) share one path.
class BrownianSource {
public:
    BrownianSource(const SimConfig& config, std::uint64_t key, std::size_t factors)
        : engine_(key),
          factors_(factors),
          per_step_(config.effective_noise_resolution() / config.steps),
          fine_sqrt_h_(std::sqrt(config.horizon /
                                 static_cast<double>(config.effective_noise_resolution()))) {}

    // Fills `dw` with the increments over the next coarse step.
    void next(std::vector<double>& dw) {
        dw.assign(factors_, 0.0);
        for (std::size_t j = 0; j < per_step_; ++j)
            for (std::size_t f = 0; f < factors_; ++f) dw[f] += fine_sqrt_h_ * normal_(engine_);
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
    std::size_t factors_;
    std::size_t per_step_;
    double fine_sqrt_h_;
};

MarketPath simulate_gbm(const ModelSpec& spec, const SimConfig& config, BrownianSource& noise) {
    const std::size_t d = spec.dim();
    const TimeGrid grid = TimeGrid::uniform(config.horizon, config.steps);
    const double h = config.horizon / static_cast<double>(config.steps);
    VectorSeries caps(config.steps + 1, d);
    std::vector<double> log_s(d);
    for (std::size_t i = 0; i < d; ++i) {
        log_s[i] = std::log(spec.initial_caps[i]);
        caps(0, i) = spec.initial_caps[i];
    }
    std::vector<double> dw;
    for (std::size_t n = 0; n < config.steps; ++n) {
        noise.next(dw);
        for (std::size_t i = 0; i < d; ++i) {
            const double b = spec.drifts.empty() ? 0.0 : spec.drifts[i];
            const double s = spec.volatilities.empty() ? spec.volatility : spec.volatilities[i];
            log_s[i] += (b - 0.5 * s * s) * h + s * dw[i];
            caps(n + 1, i) = std::exp(log_s[i]);
        }
    }
    return MarketPath::from_caps(grid, std::move(caps));
}

MarketPath simulate_atlas(const ModelSpec& spec, const SimConfig& config, BrownianSource& noise) {
    const std::size_t d = spec.dim();
    const TimeGrid grid = TimeGrid::uniform(config.horizon, config.steps);
    const double h = config.horizon / static_cast<double>(config.steps);
    const double s = spec.volatility;
    VectorSeries caps(config.steps + 1, d);
    std::vector<double> log_s(d);
    for (std::size_t i = 0; i < d; ++i) {
        log_s[i] = std::log(spec.initial_caps[i]);
        caps(0, i) = spec.initial_caps[i];
    }
    std::vector<double> dw;
    for (std::size_t n = 0; n < config.steps; ++n) {
        noise.next(dw);
        // smallest capitalization (ties: largest index) gets (d-1) g, the rest -g
        std::size_t smallest = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (log_s[i] <= log_s[smallest]) smallest = i;
        for (std::size_t i = 0; i < d; ++i) {
            const double drift = (i == smallest ? static_cast<double>(d - 1) : -1.0) * spec.atlas_drift;
            log_s[i] += (drift - 0.5 * s * s) * h + s * dw[i];
            caps(n + 1, i) = std::exp(log_s[i]);
        }
    }
    return MarketPath::from_caps(grid, std::move(caps));
}

MarketPath simulate_two_asset(const ModelSpec& spec, const SimConfig& config, BrownianSource& noise) {
    const TimeGrid grid = TimeGrid::uniform(config.horizon, config.steps);
    VectorSeries w(config.steps + 1, 2);
    double x = spec.initial_caps[0] / (spec.initial_caps[0] + spec.initial_caps[1]);
    w(0, 0) = x;
    w(0, 1) = 1.0 - x;
    std::vector<double> dw;
    for (std::size_t n = 0; n < config.steps; ++n) {
        noise.next(dw);
        // full truncation: the coefficient sees the clamped state
        const double c = std::clamp(x, 0.0, 1.0);
        x += spec.volatility * c * (1.0 - c) * dw[0];
        const double mu = std::clamp(x, 0.0, 1.0);
        w(n + 1, 0) = mu;
        w(n + 1, 1) = 1.0 - mu;
    }
    return MarketPath::from_weights(grid, std::move(w));
}

MarketPath simulate_absorbed_pair(const ModelSpec& spec, const SimConfig& config,
                                  BrownianSource& noise) {
    const TimeGrid grid = TimeGrid::uniform(config.horizon, config.steps);
    VectorSeries w(config.steps + 1, 2);
    double b = 2.0 * spec.initial_caps[0] / (spec.initial_caps[0] + spec.initial_caps[1]);
    bool stopped = false;
    w(0, 0) = b / 2.0;
    w(0, 1) = 1.0 - b / 2.0;
    std::vector<double> dw;
    for (std::size_t n = 0; n < config.steps; ++n) {
        noise.next(dw);
        if (!stopped) {
            b += spec.volatility * dw[0];
            if (b <= 0.0 || b >= 2.0) {
                b = b <= 0.0 ? 0.0 : 2.0;
                stopped = true;
            }
        }
        w(n + 1, 0) = b / 2.0;
        w(n + 1, 1) = 1.0 - b / 2.0;
    }
    return MarketPath::from_weights(grid, std::move(w));
}

// Starts at the n = 2 knot so that mu(0) = (1/2, 1/2) is interior; time is
// shifted to begin at 0.
MarketPath oscillator_market(const ModelSpec& spec) {
    const OscillatorPath osc = oscillator_path(spec.oscillator_n_max);
    const auto start = static_cast<std::size_t>(
        std::find(osc.times.begin(), osc.times.end(), 0.5) - osc.times.begin());
    std::vector<double> t(osc.times.begin() + static_cast<std::ptrdiff_t>(start), osc.times.end());
    for (double& v : t) v -= 0.5;
    VectorSeries w(t.size(), 2);
    for (std::size_t n = 0; n < t.size(); ++n) {
        w(n, 0) = osc.values[start + n];
        w(n, 1) = 1.0 - osc.values[start + n];
    }
    return MarketPath::from_weights(TimeGrid(std::move(t)), std::move(w));
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::gbm: return "gbm";
        case ModelKind::two_asset_martingale: return "two_asset_martingale";
        case ModelKind::rank_atlas: return "rank_atlas";
        case ModelKind::absorbed_brownian_pair: return "absorbed_brownian_pair";
        case ModelKind::oscillator_counterexample: return "oscillator_counterexample";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    for (auto k : {ModelKind::gbm, ModelKind::two_asset_martingale, ModelKind::rank_atlas,
                   ModelKind::absorbed_brownian_pair, ModelKind::oscillator_counterexample})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown model kind '" + name + "'");
}

void ModelSpec::validate() const {
    if (initial_caps.size() < 2) throw ValidationError("model needs d >= 2 assets");
    for (double s : initial_caps)
        if (!(s > 0.0) || !std::isfinite(s))
            throw ValidationError("initial capitalizations must be strictly positive");
    const bool pair = kind == ModelKind::two_asset_martingale ||
                      kind == ModelKind::absorbed_brownian_pair ||
                      kind == ModelKind::oscillator_counterexample;
    if (pair && initial_caps.size() != 2) throw ValidationError(to_string(kind) + " requires d = 2");
    if (!drifts.empty() && drifts.size() != dim())
        throw ValidationError("drifts must have one entry per asset");
    if (!volatilities.empty() && volatilities.size() != dim())
        throw ValidationError("volatilities must have one entry per asset");
    for (double s : volatilities)
        if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("volatilities must be nonnegative");
    for (double b : drifts)
        if (!std::isfinite(b)) throw ValidationError("drifts must be finite");
    if (kind == ModelKind::gbm) {
        if (!(volatility >= 0.0)) throw ValidationError("volatility must be nonnegative");
    } else if (kind != ModelKind::oscillator_counterexample) {
        if (!(volatility > 0.0) || !std::isfinite(volatility))
            throw ValidationError("volatility must be positive");
    }
    if (kind == ModelKind::rank_atlas && !(atlas_drift > 0.0))
        throw ValidationError("atlas_drift must be positive");
    if (kind == ModelKind::oscillator_counterexample && oscillator_n_max < 2)
        throw ValidationError("oscillator_n_max must be >= 2");
}

void SimConfig::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be positive");
    if (steps < 1) throw ValidationError("steps must be >= 1");
    if (ensemble_size < 1) throw ValidationError("ensemble_size must be >= 1");
    if (noise_resolution != 0 && noise_resolution % steps != 0)
        throw ValidationError("noise_resolution must be a multiple of steps");
}

std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

MarketPath simulate(const ModelSpec& spec, const SimConfig& config, std::size_t path_index) {
    spec.validate();
    config.validate();
    if (path_index >= config.ensemble_size)
        throw std::invalid_argument("path_index must be < ensemble_size");
    if (spec.kind == ModelKind::oscillator_counterexample) return oscillator_market(spec);

    const std::size_t factors =
        (spec.kind == ModelKind::gbm || spec.kind == ModelKind::rank_atlas) ? spec.dim() : 1;
    BrownianSource noise(config, derive_stream_key(config.seed, path_index), factors);
    switch (spec.kind) {
        case ModelKind::gbm: return simulate_gbm(spec, config, noise);
        case ModelKind::rank_atlas: return simulate_atlas(spec, config, noise);
        case ModelKind::two_asset_martingale: return simulate_two_asset(spec, config, noise);
        case ModelKind::absorbed_brownian_pair: return simulate_absorbed_pair(spec, config, noise);
        case ModelKind::oscillator_counterexample: break;
    }
    throw std::logic_error("unreachable model kind");
}

std::vector<MarketPath> simulate_ensemble(const ModelSpec& spec, const SimConfig& config,
                                          unsigned threads) {
    spec.validate();
    config.validate();
    std::vector<std::optional<MarketPath>> slots(config.ensemble_size);
    detail::parallel_for(config.ensemble_size, threads,
                         [&](std::size_t i) { slots[i].emplace(simulate(spec, config, i)); });
    std::vector<MarketPath> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::size_t oscillation_count(std::size_t n) {
    if (n == 0) throw std::invalid_argument("oscillation_count needs n >= 1");
    std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (k * k > n) --k;
    while (k * k < n) ++k;  // k = ceil(sqrt(n))
    if (k % 2 == 0) ++k;
    return k;
}

OscillatorPath oscillator_path(std::size_t n_max) {
    if (n_max < 1) throw std::invalid_argument("oscillator_path needs n_max >= 1");
    OscillatorPath out;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double dn = static_cast<double>(n);
        const double hi = 1.0 / dn, lo = 1.0 / (dn + 1.0);
        const double start = 1.0 - hi;
        const double width = hi - lo;  // same as the interval length
        const std::size_t a = oscillation_count(n);
        for (std::size_t j = 0; j < a; ++j) {
            out.times.push_back(start + width * static_cast<double>(j) / static_cast<double>(a));
            out.values.push_back(j % 2 == 0 ? hi : lo);
        }
    }
    out.times.push_back(1.0 - 1.0 / (static_cast<double>(n_max) + 1.0));
    out.values.push_back(1.0 / (static_cast<double>(n_max) + 1.0));
    return out;
}

}  // namespace fgen
