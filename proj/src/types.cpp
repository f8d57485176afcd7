#include "fgen/types.hpp"

#include <algorithm>
#include <cmath>

namespace fgen {

namespace {

constexpr double kSimplexTolerance = 1e-12;

void check_weights(const VectorSeries& w) {
    for (std::size_t n = 0; n < w.length(); ++n) {
        double sum = 0.0;
        for (double x : w.row(n)) {
            if (!(x >= 0.0 && x <= 1.0))
                throw ValidationError("market weight outside [0,1] at time index " +
                                      std::to_string(n));
            sum += x;
        }
        if (std::abs(sum - 1.0) > kSimplexTolerance)
            throw ValidationError("market weights do not sum to 1 at time index " +
                                  std::to_string(n));
    }
    for (double x : w.row(0))
        if (!(x > 0.0)) throw ValidationError("initial market weights must be strictly positive");
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) throw ValidationError("time grid needs at least 2 points");
    if (times_.front() != 0.0) throw ValidationError("time grid must start at 0");
    for (std::size_t n = 1; n < times_.size(); ++n)
        if (!(times_[n] > times_[n - 1]) || !std::isfinite(times_[n]))
            throw ValidationError("time grid must be strictly increasing");
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("horizon must be positive");
    if (steps < 1) throw ValidationError("steps must be >= 1");
    std::vector<double> t(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n)
        t[n] = horizon * static_cast<double>(n) / static_cast<double>(steps);
    t.back() = horizon;
    return TimeGrid(std::move(t));
}

std::size_t TimeGrid::index_at_or_after(double t) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(times_.begin(), times_.end(), t - slack);
    return static_cast<std::size_t>(it - times_.begin());
}

VectorSeries to_market_weights(const VectorSeries& caps) {
    VectorSeries w(caps.length(), caps.dim());
    for (std::size_t n = 0; n < caps.length(); ++n) {
        double total = 0.0;
        for (double s : caps.row(n)) {
            if (s < 0.0) throw ValidationError("negative capitalization at time index " + std::to_string(n));
            total += s;
        }
        if (!(total > 0.0) || !std::isfinite(total))
            throw ValidationError("total capitalization vanishes at time index " + std::to_string(n));
        for (std::size_t i = 0; i < caps.dim(); ++i) w(n, i) = caps(n, i) / total;
    }
    return w;
}

MarketPath MarketPath::from_caps(TimeGrid grid, VectorSeries caps) {
    if (caps.length() != grid.size()) throw std::invalid_argument("caps length does not match grid");
    if (caps.dim() < 2) throw ValidationError("need at least 2 assets");
    VectorSeries w = to_market_weights(caps);
    check_weights(w);
    return MarketPath(std::move(grid), std::move(caps), std::move(w));
}

MarketPath MarketPath::from_weights(TimeGrid grid, VectorSeries weights) {
    if (weights.length() != grid.size()) throw std::invalid_argument("weights length does not match grid");
    if (weights.dim() < 2) throw ValidationError("need at least 2 assets");
    check_weights(weights);
    VectorSeries caps = weights;
    return MarketPath(std::move(grid), std::move(caps), std::move(weights));
}

}  // namespace fgen
