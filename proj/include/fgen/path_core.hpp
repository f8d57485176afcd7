#pragma once

// Discrete pathwise calculus on sampled paths. Every stochastic integral is a
// left-endpoint Riemann sum, so integrands are used in a non-anticipating way.

#include "fgen/types.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace fgen {

/// I(t_n) = sum_{m<n} <integrand(t_m), x(t_{m+1}) - x(t_m)>, I(0) = 0.
Series left_riemann_integral(const VectorSeries& integrand, const VectorSeries& x);

/// [x,y](t_n) = sum_{m<n} dx(t_m) dy(t_m).
Series quadratic_covariation(std::span<const double> x, std::span<const double> y);

double total_variation(std::span<const double> x);

struct LocalTimeSeries {
    Series values;           // nondecreasing, values[0] == 0
    std::string descriptor;  // e.g. "level=0.25" or "collision(1,2)"
};

/// Tanaka estimate of the local time of x at `level`:
///   |x(t_n)-a| - |x(0)-a| - sum_{m<n} sgn(x(t_m)-a) dx(t_m),  sgn(0) = -1,
/// clamped to be nondecreasing.
LocalTimeSeries local_time(std::span<const double> x, double level);

/// Ranking of a single simplex point: descending values, ties broken in favor
/// of the smaller index. Ranks and indices are 0-based.
struct RankedPoint {
    std::vector<double> ranked;            // x_(0) >= x_(1) >= ...
    std::vector<std::size_t> perm;         // perm[l] = index holding rank l
    std::vector<std::size_t> tie_counts;   // N_l = #{i : x_i == x_(l)}
};

RankedPoint rank_point(std::span<const double> x);

/// Per-time ranking of a weight path.
struct RankedView {
    VectorSeries ranked;
    std::vector<std::size_t> perm;        // row-major, length * dim
    std::vector<std::size_t> tie_counts;  // row-major, length * dim

    std::size_t length() const noexcept { return ranked.length(); }
    std::size_t dim() const noexcept { return ranked.dim(); }
    std::size_t index_at(std::size_t n, std::size_t rank) const { return perm[n * dim() + rank]; }
    std::size_t ties_at(std::size_t n, std::size_t rank) const { return tie_counts[n * dim() + rank]; }
    /// Value of the original component i at time n (inverse permutation).
    double original(std::size_t n, std::size_t i) const;
};

RankedView rank_with_ties(const VectorSeries& weights);

/// Collision local time of ranks k < l (0-based). Per step, with a and b the
/// indices holding ranks k and l at t_m and D = mu_a - mu_b, the increment is
/// the Tanaka increment |D(t_{m+1})| - |D(t_m)| - s dD with s = sign(D(t_m))
/// (s = 0 at an exact tie).
LocalTimeSeries collision_local_time(const RankedView& ranked, std::size_t k, std::size_t l);

struct AbsorptionTimes {
    static constexpr double never = std::numeric_limits<double>::infinity();
    std::vector<double> per_asset;      // first time mu_i <= threshold
    double first = never;               // min over assets
    double concentration = never;       // first time some mu_i >= 1 - threshold
};

AbsorptionTimes absorption_times(const MarketPath& path, double zero_threshold = 0.0);

/// Per-rank residual of the ranked semimartingale decomposition
///   mu_(l)(t) - mu_(l)(0) - sum_i int 1/N_l 1{mu_(l)=mu_i} dmu_i
///             - sum_{k>l} int 1/N dLambda^(l,k) + sum_{k<l} int 1/N dLambda^(k,l).
/// N on the collision terms is the multiplicity on the collision support,
/// max(N_l(t_m), |k-l|+1).
VectorSeries ranked_decomposition_residual(const MarketPath& path);

}  // namespace fgen
