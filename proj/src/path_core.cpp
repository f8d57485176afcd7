#include "fgen/path_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fgen {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("grid mismatch: series lengths differ");
}

// Left-continuous signum: sgn(0) = -1.
double sgn_left(double v) { return v > 0.0 ? 1.0 : -1.0; }

LocalTimeSeries clamped(Series raw_increments, std::string descriptor) {
    LocalTimeSeries out{Series(raw_increments.size() + 1, 0.0), std::move(descriptor)};
    double raw = 0.0;
    for (std::size_t m = 0; m < raw_increments.size(); ++m) {
        raw += raw_increments[m];
        out.values[m + 1] = std::max(out.values[m], raw);
    }
    return out;
}

}  // namespace

Series left_riemann_integral(const VectorSeries& integrand, const VectorSeries& x) {
    require_same_length(integrand.length(), x.length());
    if (integrand.dim() != x.dim()) throw std::invalid_argument("integrand and path dimensions differ");
    Series out(x.length(), 0.0);
    for (std::size_t m = 0; m + 1 < x.length(); ++m) {
        double gain = 0.0;
        for (std::size_t i = 0; i < x.dim(); ++i) gain += integrand(m, i) * (x(m + 1, i) - x(m, i));
        out[m + 1] = out[m] + gain;
    }
    return out;
}

Series quadratic_covariation(std::span<const double> x, std::span<const double> y) {
    require_same_length(x.size(), y.size());
    Series out(x.size(), 0.0);
    for (std::size_t m = 0; m + 1 < x.size(); ++m)
        out[m + 1] = out[m] + (x[m + 1] - x[m]) * (y[m + 1] - y[m]);
    return out;
}

double total_variation(std::span<const double> x) {
    double tv = 0.0;
    for (std::size_t m = 0; m + 1 < x.size(); ++m) tv += std::abs(x[m + 1] - x[m]);
    return tv;
}

LocalTimeSeries local_time(std::span<const double> x, double level) {
    if (x.empty()) throw std::invalid_argument("local_time needs a nonempty series");
    Series inc(x.size() - 1);
    for (std::size_t m = 0; m + 1 < x.size(); ++m)
        inc[m] = std::abs(x[m + 1] - level) - std::abs(x[m] - level) -
                 sgn_left(x[m] - level) * (x[m + 1] - x[m]);
    return clamped(std::move(inc), "level=" + std::to_string(level));
}

RankedPoint rank_point(std::span<const double> x) {
    const std::size_t d = x.size();
    RankedPoint r;
    r.perm.resize(d);
    std::iota(r.perm.begin(), r.perm.end(), std::size_t{0});
    std::stable_sort(r.perm.begin(), r.perm.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
    r.ranked.resize(d);
    r.tie_counts.resize(d);
    for (std::size_t l = 0; l < d; ++l) r.ranked[l] = x[r.perm[l]];
    for (std::size_t l = 0; l < d; ++l)
        r.tie_counts[l] = static_cast<std::size_t>(
            std::count(x.begin(), x.end(), r.ranked[l]));
    return r;
}

double RankedView::original(std::size_t n, std::size_t i) const {
    for (std::size_t l = 0; l < dim(); ++l)
        if (index_at(n, l) == i) return ranked(n, l);
    throw std::out_of_range("index not present in ranking");
}

RankedView rank_with_ties(const VectorSeries& weights) {
    RankedView v;
    v.ranked = VectorSeries(weights.length(), weights.dim());
    v.perm.resize(weights.length() * weights.dim());
    v.tie_counts.resize(weights.length() * weights.dim());
    for (std::size_t n = 0; n < weights.length(); ++n) {
        RankedPoint r = rank_point(weights.row(n));
        std::copy(r.ranked.begin(), r.ranked.end(), v.ranked.row(n).begin());
        std::copy(r.perm.begin(), r.perm.end(), v.perm.begin() + n * weights.dim());
        std::copy(r.tie_counts.begin(), r.tie_counts.end(), v.tie_counts.begin() + n * weights.dim());
    }
    return v;
}

LocalTimeSeries collision_local_time(const RankedView& ranked, std::size_t k, std::size_t l) {
    if (!(k < l && l < ranked.dim()))
        throw std::invalid_argument("collision_local_time needs ranks k < l < d");
    Series inc(ranked.length() > 0 ? ranked.length() - 1 : 0);
    for (std::size_t m = 0; m + 1 < ranked.length(); ++m) {
        const std::size_t a = ranked.index_at(m, k);
        const std::size_t b = ranked.index_at(m, l);
        const double gap = ranked.ranked(m, k) - ranked.ranked(m, l);
        const double next = ranked.original(m + 1, a) - ranked.original(m + 1, b);
        const double s = gap > 0.0 ? 1.0 : 0.0;
        inc[m] = std::abs(next) - gap - s * (next - gap);
    }
    return clamped(std::move(inc),
                   "collision(" + std::to_string(k + 1) + "," + std::to_string(l + 1) + ")");
}

AbsorptionTimes absorption_times(const MarketPath& path, double zero_threshold) {
    AbsorptionTimes out;
    out.per_asset.assign(path.dim(), AbsorptionTimes::never);
    const auto& w = path.weights();
    for (std::size_t n = 0; n < path.length(); ++n) {
        for (std::size_t i = 0; i < path.dim(); ++i) {
            if (out.per_asset[i] == AbsorptionTimes::never && w(n, i) <= zero_threshold)
                out.per_asset[i] = path.grid()[n];
            if (out.concentration == AbsorptionTimes::never && w(n, i) >= 1.0 - zero_threshold)
                out.concentration = path.grid()[n];
        }
    }
    out.first = *std::min_element(out.per_asset.begin(), out.per_asset.end());
    return out;
}

VectorSeries ranked_decomposition_residual(const MarketPath& path) {
    const auto& w = path.weights();
    const std::size_t d = path.dim();
    const std::size_t len = path.length();
    const RankedView rv = rank_with_ties(w);

    // collision[k][l] for k < l
    std::vector<std::vector<Series>> collision(d, std::vector<Series>(d));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = k + 1; l < d; ++l) collision[k][l] = collision_local_time(rv, k, l).values;

    VectorSeries residual(len, d, 0.0);
    for (std::size_t m = 0; m + 1 < len; ++m) {
        for (std::size_t l = 0; l < d; ++l) {
            const double level = rv.ranked(m, l);
            const double n_l = static_cast<double>(rv.ties_at(m, l));
            double tracked = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                if (w(m, i) == level) tracked += (w(m + 1, i) - w(m, i)) / n_l;

            double collisions = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                if (k == l) continue;
                const std::size_t lo = std::min(k, l), hi = std::max(k, l);
                const double dlambda = collision[lo][hi][m + 1] - collision[lo][hi][m];
                if (dlambda == 0.0) continue;
                const double support_n = std::max(n_l, static_cast<double>(hi - lo + 1));
                collisions += (k > l ? 1.0 : -1.0) * dlambda / support_n;
            }
            const double step = (rv.ranked(m + 1, l) - level) - tracked - collisions;
            residual(m + 1, l) = residual(m, l) + step;
        }
    }
    return residual;
}

}  // namespace fgen
