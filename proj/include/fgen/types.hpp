#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgen {

/// One real value per grid point.
using Series = std::vector<double>;

/// Raised for malformed parameters, configs or schema violations.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation hits a non-finite or out-of-domain value at a
/// specific grid point (e.g. a generating function vanishing in
/// multiplicative mode).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::size_t time_index)
        : std::runtime_error(what + " (time index " + std::to_string(time_index) + ")"),
          time_index_(time_index) {}

    std::size_t time_index() const noexcept { return time_index_; }

private:
    std::size_t time_index_;
};

/// A per-time sequence of d-vectors, stored row-major (one row per grid point).
class VectorSeries {
public:
    VectorSeries() = default;
    VectorSeries(std::size_t length, std::size_t dim, double fill = 0.0)
        : length_(length), dim_(dim), data_(length * dim, fill) {}

    std::size_t length() const noexcept { return length_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return length_ == 0; }

    double& operator()(std::size_t n, std::size_t i) { return data_[n * dim_ + i]; }
    double operator()(std::size_t n, std::size_t i) const { return data_[n * dim_ + i]; }

    std::span<double> row(std::size_t n) { return {data_.data() + n * dim_, dim_}; }
    std::span<const double> row(std::size_t n) const { return {data_.data() + n * dim_, dim_}; }

    Series column(std::size_t i) const {
        Series out(length_);
        for (std::size_t n = 0; n < length_; ++n) out[n] = (*this)(n, i);
        return out;
    }

    const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const VectorSeries&) const = default;

private:
    std::size_t length_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Strictly increasing time points starting at 0, at least two of them.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);

    static TimeGrid uniform(double horizon, std::size_t steps);

    std::size_t size() const noexcept { return times_.size(); }
    double operator[](std::size_t n) const { return times_[n]; }
    double horizon() const { return times_.back(); }
    const std::vector<double>& times() const noexcept { return times_; }

    /// First grid index whose time is >= t (up to a relative 1e-12 slack);
    /// size() if t lies beyond the horizon.
    std::size_t index_at_or_after(double t) const;

    bool operator==(const TimeGrid&) const = default;

private:
    std::vector<double> times_;
};

/// Capitalizations S(t) and market weights mu(t) = S(t) / sum_j S_j(t) on a grid.
class MarketPath {
public:
    /// Normalizes `caps` into weights. Throws ValidationError when the total
    /// capitalization vanishes, a cap is negative, or mu(0) has a zero entry.
    static MarketPath from_caps(TimeGrid grid, VectorSeries caps);

    /// For models specified directly on the simplex. The weights double as
    /// capitalizations (total market capitalization constant at 1).
    static MarketPath from_weights(TimeGrid grid, VectorSeries weights);

    const TimeGrid& grid() const noexcept { return grid_; }
    const VectorSeries& caps() const noexcept { return caps_; }
    const VectorSeries& weights() const noexcept { return weights_; }

    std::size_t length() const noexcept { return weights_.length(); }
    std::size_t dim() const noexcept { return weights_.dim(); }
    std::span<const double> weights_at(std::size_t n) const { return weights_.row(n); }

private:
    MarketPath(TimeGrid grid, VectorSeries caps, VectorSeries weights)
        : grid_(std::move(grid)), caps_(std::move(caps)), weights_(std::move(weights)) {}

    TimeGrid grid_;
    VectorSeries caps_;
    VectorSeries weights_;
};

/// Componentwise normalization S -> mu. Throws ValidationError if some row sums to <= 0.
VectorSeries to_market_weights(const VectorSeries& caps);

}  // namespace fgen
