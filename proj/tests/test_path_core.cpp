#include "fgen/market_models.hpp"
#include "fgen/path_core.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace fgen;
using fgen::test::weights_path;

namespace {

// Tanaka increment at level a written as twice the overshoot past a.
double overshoot_increment(double x, double next, double a) {
    return x > a ? 2.0 * std::max(a - next, 0.0) : 2.0 * std::max(next - a, 0.0);
}

}  // namespace

TEST_CASE("time grid and market path validation") {
    CHECK_THROWS_AS(TimeGrid({0.0}), ValidationError);
    CHECK_THROWS_AS(TimeGrid({0.1, 0.2}), ValidationError);
    CHECK_THROWS_AS(TimeGrid({0.0, 0.5, 0.5}), ValidationError);
    const auto g = TimeGrid::uniform(2.0, 4);
    CHECK(g.size() == 5);
    CHECK(g.horizon() == doctest::Approx(2.0));
    CHECK(g.index_at_or_after(0.5) == 1);
    CHECK(g.index_at_or_after(0.6) == 2);
    CHECK(g.index_at_or_after(3.0) == 5);

    VectorSeries caps(2, 2, 1.0);
    caps(1, 0) = 3.0;
    const auto p = MarketPath::from_caps(TimeGrid::uniform(1.0, 1), caps);
    CHECK(p.weights()(0, 0) == 0.5);
    CHECK(p.weights()(1, 0) == 0.75);
    CHECK(p.weights()(1, 1) == 0.25);

    VectorSeries zero_start(2, 2, 1.0);
    zero_start(0, 0) = 0.0;
    CHECK_THROWS_AS(MarketPath::from_caps(TimeGrid::uniform(1.0, 1), zero_start), ValidationError);
    VectorSeries vanishing(2, 2, 1.0);
    vanishing(1, 0) = vanishing(1, 1) = 0.0;
    CHECK_THROWS_AS(to_market_weights(vanishing), ValidationError);
    VectorSeries one_asset(2, 1, 1.0);
    CHECK_THROWS_AS(MarketPath::from_caps(TimeGrid::uniform(1.0, 1), one_asset), ValidationError);
}

TEST_CASE("market weights are homogeneous in the capitalizations") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto caps = test::random_series(rng, 5, 3);
        VectorSeries pos(5, 3), scaled(5, 3);
        for (std::size_t n = 0; n < 5; ++n)
            for (std::size_t i = 0; i < 3; ++i) {
                pos(n, i) = std::exp(caps(n, i));
                scaled(n, i) = 8.0 * pos(n, i);  // power of two keeps the division exact
            }
        CHECK(to_market_weights(pos) == to_market_weights(scaled));
        const auto w = to_market_weights(pos);
        for (std::size_t n = 0; n < 5; ++n) {
            const auto row = w.row(n);
            CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("left Riemann integral") {
    VectorSeries theta(2, 1), x(2, 1);
    theta(0, 0) = 2.0;
    x(1, 0) = 0.3;
    CHECK(left_riemann_integral(theta, x)[1] == doctest::Approx(0.6).epsilon(1e-15));

    const auto path = weights_path({{0.5, 0.5}, {0.6, 0.4}, {0.3, 0.7}});
    const VectorSeries ones(3, 2, 1.0), zeros(3, 2, 0.0);
    for (double v : left_riemann_integral(ones, path.weights())) CHECK(std::abs(v) <= 1e-15);
    for (double v : left_riemann_integral(zeros, path.weights())) CHECK(v == 0.0);

    CHECK_THROWS_AS(left_riemann_integral(VectorSeries(2, 2), path.weights()), std::invalid_argument);
}

TEST_CASE("property: gains integral ignores per-time scalar shifts of the integrand") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const auto path = test::random_interior_path(rng, d, 50);
        const auto theta = test::random_series(rng, path.length(), d);
        const auto shift = test::random_series(rng, path.length(), 1);
        VectorSeries shifted = theta;
        for (std::size_t n = 0; n < path.length(); ++n)
            for (std::size_t i = 0; i < d; ++i) shifted(n, i) += 10.0 * shift(n, 0);
        const auto a = left_riemann_integral(theta, path.weights());
        const auto b = left_riemann_integral(shifted, path.weights());
        CHECK(test::max_abs_diff(a, b) <= 1e-12);
    }
}

TEST_CASE("quadratic covariation") {
    const Series x{0.0, 0.1, 0.0};
    CHECK(quadratic_covariation(x, x)[2] == doctest::Approx(0.02).epsilon(1e-14));
    const Series c{0.3, 0.3, 0.3};
    for (double v : quadratic_covariation(c, x)) CHECK(v == 0.0);
    CHECK_THROWS_AS(quadratic_covariation(x, Series{1.0}), std::invalid_argument);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = test::random_series(rng, 40, 2);
        const Series a = s.column(0), b = s.column(1);
        Series sum(a.size());
        for (std::size_t n = 0; n < a.size(); ++n) sum[n] = a[n] + b[n];
        const auto ab = quadratic_covariation(a, b);
        const auto ss = quadratic_covariation(sum, sum);
        const auto aa = quadratic_covariation(a, a);
        const auto bb = quadratic_covariation(b, b);
        for (std::size_t n = 0; n < a.size(); ++n) {
            CHECK(std::abs(ab[n] - 0.5 * (ss[n] - aa[n] - bb[n])) <= 1e-12);
            CHECK(aa[n] >= 0.0);
            if (n) CHECK(aa[n] >= aa[n - 1]);
        }
    }
}

TEST_CASE("total variation") {
    CHECK(total_variation(Series{0.1, 0.2, 0.5, 0.9}) == doctest::Approx(0.8));
    CHECK(total_variation(Series{0.4, 0.4, 0.4}) == 0.0);
    CHECK(total_variation(Series{1.0}) == 0.0);
}

TEST_CASE("local time at a level") {
    SUBCASE("k legs across the level") {
        for (std::size_t k = 1; k <= 6; ++k) {
            Series x(k + 1);
            for (std::size_t n = 0; n <= k; ++n) x[n] = n % 2 ? 0.2 : 0.0;
            const auto lt = local_time(x, 0.1);
            CHECK(lt.values.back() == doctest::Approx(0.2 * static_cast<double>(k)));
            CHECK(lt.values.front() == 0.0);
        }
    }
    SUBCASE("no crossing gives zero") {
        const auto lt = local_time(Series{0.5, 0.6, 0.55, 0.7}, 0.1);
        for (double v : lt.values) CHECK(v == 0.0);
    }
    SUBCASE("left-continuous signum at the level") {
        // sitting exactly at a with sgn(0) = -1: moving up accrues 2 (x' - a)
        const auto lt = local_time(Series{0.1, 0.15}, 0.1);
        CHECK(lt.values[1] == doctest::Approx(0.1));
        const auto down = local_time(Series{0.1, 0.05}, 0.1);
        CHECK(down.values[1] == 0.0);
    }
    SUBCASE("property: matches the overshoot oracle and is nondecreasing") {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> z(0.0, 0.05);
        for (int trial = 0; trial < 100; ++trial) {
            Series x(200);
            x[0] = 0.5;
            for (std::size_t n = 1; n < x.size(); ++n) x[n] = x[n - 1] + z(rng);
            const double a = 0.45 + 0.001 * trial;
            const auto lt = local_time(x, a);
            double oracle = 0.0;
            for (std::size_t n = 0; n + 1 < x.size(); ++n) {
                oracle += overshoot_increment(x[n], x[n + 1], a);
                CHECK(lt.values[n + 1] >= lt.values[n]);
                CHECK(lt.values[n + 1] == doctest::Approx(oracle).epsilon(1e-12).scale(1.0));
            }
        }
    }
}

TEST_CASE("ranking with ties") {
    const double a[] = {0.2, 0.5, 0.3};
    auto r = rank_point(a);
    CHECK(r.ranked == std::vector<double>{0.5, 0.3, 0.2});
    CHECK(r.perm == std::vector<std::size_t>{1, 2, 0});
    CHECK(r.tie_counts == std::vector<std::size_t>{1, 1, 1});

    const double b[] = {0.4, 0.4, 0.2};
    r = rank_point(b);
    CHECK(r.perm == std::vector<std::size_t>{0, 1, 2});
    CHECK(r.tie_counts == std::vector<std::size_t>{2, 2, 1});

    const double third = 1.0 / 3.0;
    const double c[] = {third, third, third};
    CHECK(rank_point(c).tie_counts == std::vector<std::size_t>{3, 3, 3});

    const double e[] = {0.2, 0.4, 0.4};
    CHECK(rank_point(e).perm == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("property: ranking is sorted, a permutation, and invertible") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coarse(1, 4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + trial % 5;
        VectorSeries w(3, d);
        for (std::size_t n = 0; n < 3; ++n) {
            double total = 0.0;
            for (std::size_t i = 0; i < d; ++i) total += (w(n, i) = coarse(rng));  // coarse values force ties
            for (std::size_t i = 0; i < d; ++i) w(n, i) /= total;
        }
        const auto rv = rank_with_ties(w);
        for (std::size_t n = 0; n < 3; ++n) {
            std::vector<bool> seen(d, false);
            std::size_t multiplicity = 0;
            for (std::size_t l = 0; l < d; ++l) {
                if (l) CHECK(rv.ranked(n, l - 1) >= rv.ranked(n, l));
                const std::size_t i = rv.index_at(n, l);
                CHECK_FALSE(seen[i]);
                seen[i] = true;
                CHECK(rv.original(n, i) == w(n, i));
                if (l && rv.ranked(n, l) == rv.ranked(n, l - 1)) CHECK(rv.index_at(n, l - 1) < i);
                if (l == 0 || rv.ranked(n, l) != rv.ranked(n, l - 1)) multiplicity += rv.ties_at(n, l);
            }
            CHECK(multiplicity == d);
        }
    }
}

TEST_CASE("collision local time") {
    const auto apart = weights_path({{0.8, 0.2}, {0.75, 0.25}, {0.7, 0.3}});
    const auto rv = rank_with_ties(apart.weights());
    for (double v : collision_local_time(rv, 0, 1).values) CHECK(v == 0.0);
    CHECK_THROWS_AS(collision_local_time(rv, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(collision_local_time(rv, 0, 2), std::invalid_argument);

    // mu_1 crosses 1/2: |mu_1 - mu_2| Tanaka sum
    const auto cross = weights_path({{0.55, 0.45}, {0.45, 0.55}, {0.52, 0.48}});
    const auto lt = collision_local_time(rank_with_ties(cross.weights()), 0, 1);
    CHECK(lt.values[1] == doctest::Approx(0.2));  // gap 0.1 -> -0.1 overshoots by 0.1, doubled
    CHECK(lt.values[2] == doctest::Approx(0.2 + 0.08));
    CHECK(lt.values[2] > 0.0);
}

TEST_CASE("absorption times") {
    const auto interior = weights_path({{0.5, 0.5}, {0.4, 0.6}});
    const auto at = absorption_times(interior);
    CHECK(at.first == AbsorptionTimes::never);
    CHECK(at.concentration == AbsorptionTimes::never);

    ModelSpec spec;
    spec.kind = ModelKind::absorbed_brownian_pair;
    spec.volatility = 1.0;
    SimConfig cfg;
    cfg.steps = 512;
    cfg.ensemble_size = 200;
    cfg.seed = 9;
    std::size_t absorbed = 0;
    for (std::size_t p = 0; p < cfg.ensemble_size; ++p) {
        const auto path = simulate(spec, cfg, p);
        const auto times = absorption_times(path);
        // scan oracle
        std::size_t hit = path.length();
        for (std::size_t n = 0; n < path.length() && hit == path.length(); ++n)
            if (path.weights()(n, 0) == 0.0) hit = n;
        if (hit < path.length()) {
            ++absorbed;
            CHECK(times.per_asset[0] == path.grid()[hit]);
            CHECK(times.concentration == times.per_asset[0]);  // d = 2: mu_2 hits 1 at the same time
            for (std::size_t n = hit; n < path.length(); ++n) CHECK(path.weights()(n, 0) == 0.0);
        } else {
            CHECK(times.per_asset[0] == AbsorptionTimes::never);
        }
        CHECK(times.first == std::min(times.per_asset[0], times.per_asset[1]));
    }
    CHECK(absorbed > 0);
}

TEST_CASE("ranked decomposition residual") {
    const auto constant = weights_path({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}});
    const auto r_constant = ranked_decomposition_residual(constant);
    for (double v : r_constant.data()) CHECK(v == 0.0);

    const auto apart = weights_path({{0.8, 0.2}, {0.75, 0.25}, {0.7, 0.3}});
    const auto r_apart = ranked_decomposition_residual(apart);
    for (double v : r_apart.data()) CHECK(v == 0.0);

    const auto cross = weights_path({{0.55, 0.45}, {0.45, 0.55}, {0.52, 0.48}, {0.5, 0.5}, {0.6, 0.4}});
    const auto r_cross = ranked_decomposition_residual(cross);
    for (double v : r_cross.data()) CHECK(std::abs(v) <= 1e-15);

    SUBCASE("property: d = 3 residual shrinks under refinement on average") {
        ModelSpec spec;
        spec.initial_caps = {1.0, 1.0, 1.0};
        spec.volatility = 0.4;
        SimConfig coarse;
        coarse.steps = 256;
        coarse.noise_resolution = 4096;
        coarse.ensemble_size = 40;
        coarse.seed = 21;
        SimConfig fine = coarse;
        fine.steps = 4096;
        double sum_coarse = 0.0, sum_fine = 0.0;
        for (std::size_t p = 0; p < coarse.ensemble_size; ++p) {
            auto worst = [](const VectorSeries& r) {
                double m = 0.0;
                for (double v : r.data()) m = std::max(m, std::abs(v));
                return m;
            };
            sum_coarse += worst(ranked_decomposition_residual(simulate(spec, coarse, p)));
            sum_fine += worst(ranked_decomposition_residual(simulate(spec, fine, p)));
        }
        CHECK(sum_fine < sum_coarse);
    }
}
