#pragma once

// Fixtures and random generators shared by the unit tests.

#include "fgen/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fgen::test {

inline MarketPath weights_path(const std::vector<std::vector<double>>& rows, double dt = 1.0) {
    const std::size_t len = rows.size();
    const std::size_t d = rows.front().size();
    VectorSeries w(len, d);
    for (std::size_t n = 0; n < len; ++n)
        for (std::size_t i = 0; i < d; ++i) w(n, i) = rows[n][i];
    std::vector<double> t(len);
    for (std::size_t n = 0; n < len; ++n) t[n] = dt * static_cast<double>(n);
    return MarketPath::from_weights(TimeGrid(t), std::move(w));
}

inline std::vector<double> random_simplex_point(std::mt19937_64& rng, std::size_t d) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(d);
    double total = 0.0;
    for (double& v : x) total += (v = e(rng));
    for (double& v : x) v /= total;
    return x;
}

/// Interior random path: log-caps perform a Gaussian walk with step size `sigma`.
inline MarketPath random_interior_path(std::mt19937_64& rng, std::size_t d, std::size_t steps, double sigma = 0.05) {
    std::normal_distribution<double> z(0.0, sigma);
    VectorSeries caps(steps + 1, d);
    const auto start = random_simplex_point(rng, d);
    for (std::size_t i = 0; i < d; ++i) caps(0, i) = start[i];
    for (std::size_t n = 0; n < steps; ++n)
        for (std::size_t i = 0; i < d; ++i) caps(n + 1, i) = caps(n, i) * std::exp(z(rng));
    return MarketPath::from_caps(TimeGrid::uniform(1.0, steps), std::move(caps));
}

/// Random vector series of the given shape with N(0,1) entries.
inline VectorSeries random_series(std::mt19937_64& rng, std::size_t len, std::size_t d) {
    std::normal_distribution<double> z;
    VectorSeries s(len, d);
    for (std::size_t n = 0; n < len; ++n)
        for (std::size_t i = 0; i < d; ++i) s(n, i) = z(rng);
    return s;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace fgen::test
