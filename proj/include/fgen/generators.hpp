#pragma once

// Generating functions G on the simplex, their derivative selections DG, and
// the finite-variation process Gamma^G along a sampled path.

#include "fgen/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fgen {

enum class GeneratorKind { entropy, quadratic, gini, large_cap, small_cap, geometric_mean, custom };

std::string to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& name);

struct GeneratorParams {
    double c = 1.0;     // quadratic shift: H^(c)(x) = c - sum x_i^2
    std::size_t m = 1;  // large_cap / small_cap split, 1 <= m <= d-1
};

using ValueMap = std::function<double(std::span<const double>)>;
using GradientMap = std::function<std::vector<double>(std::span<const double>)>;

class GeneratingFunction {
public:
    static GeneratingFunction builtin(GeneratorKind kind, GeneratorParams params = {});

    /// Wraps a concave value map with a supergradient selection. Draws
    /// `samples` pairs (x, y) uniformly from the open simplex and throws
    /// ValidationError if G(y) - G(x) > <xi(x), y - x> + 1e-9 for any pair.
    static GeneratingFunction custom_concave(ValueMap value, GradientMap gradient, std::size_t dim,
                                             std::uint64_t seed = 0, std::size_t samples = 2000,
                                             std::string name = "custom");

    GeneratorKind kind() const noexcept { return kind_; }
    const GeneratorParams& params() const noexcept { return params_; }
    const std::string& name() const noexcept { return name_; }
    bool rank_based() const noexcept {
        return kind_ == GeneratorKind::large_cap || kind_ == GeneratorKind::small_cap;
    }
    bool has_analytic_gamma() const noexcept { return kind_ != GeneratorKind::custom && !alt_gradient_; }

    double value(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;

    /// sup of G over the closed d-simplex when known in closed form.
    std::optional<double> known_supremum(std::size_t d) const;

    /// x -> a G(x) + b. Gamma scales by a.
    GeneratingFunction affine(double a, double b) const;
    /// x -> G(x) / divisor, evaluated as a division so G(x0)/G(x0) == 1 exactly.
    GeneratingFunction divided_by(double divisor) const;
    /// Same value map, different derivative selection.
    GeneratingFunction with_gradient(GradientMap alt) const;

    /// Linear-in-G factor applied on top of the base function: value =
    /// factor() * base + offset. Used by the analytic Gamma recipes.
    double factor() const noexcept;

private:
    struct Stage {
        double mul = 1.0;
        double add = 0.0;
        double div = 1.0;
    };

    double base_value(std::span<const double> x) const;
    std::vector<double> base_gradient(std::span<const double> x) const;
    void check_dim(std::span<const double> x) const;

    GeneratorKind kind_ = GeneratorKind::custom;
    GeneratorParams params_;
    std::string name_;
    std::size_t dim_ = 0;  // 0: any d >= 2
    ValueMap custom_value_;
    GradientMap custom_gradient_;
    GradientMap alt_gradient_;
    std::vector<Stage> stages_;
};

enum class GammaMethod { by_definition, analytic };

std::string to_string(GammaMethod method);

struct GammaSeries {
    Series values;  // Gamma(t_n), values[0] == 0
    GammaMethod method = GammaMethod::by_definition;
};

/// G and DG evaluated at every grid point of a path.
struct PathEvaluation {
    Series g;
    VectorSeries dg;
};

/// Throws NumericalError naming the first grid index where G or DG is not finite.
PathEvaluation evaluate_along(const GeneratingFunction& G, const MarketPath& path);

/// Gamma(t_n) = G(mu(0)) - G(mu(t_n)) + sum_{m<n} <DG(mu(t_m)), mu(t_{m+1}) - mu(t_m)>.
GammaSeries gamma_by_definition(const GeneratingFunction& G, const MarketPath& path);
GammaSeries gamma_by_definition(const PathEvaluation& eval, const MarketPath& path);

/// Closed-form Gamma from brackets and local times. Throws std::invalid_argument
/// for functions without a recipe (custom functions, replaced gradients).
///   entropy:        1/2 sum_i sum_m (dmu_i)^2 / mu_i(t_m) 1{mu_i(t_m) > 0}
///   quadratic:      sum_i [mu_i, mu_i]
///   gini:           1/2 sum_i L_i, L_i the Tanaka local time of mu_i at 1/d
///   large_cap(m):   -1/2 Lambda^(m,m+1) (ranks 1-based)
///   small_cap(m):   +1/2 Lambda^(m,m+1)
///   geometric_mean: -1/2 sum_ij D_ij G(mu(t_m)) dmu_i dmu_j
GammaSeries gamma_analytic(const GeneratingFunction& G, const MarketPath& path);

/// G / G(mu0) if G(mu0) > 0, G + 1 if G(mu0) == 0; ValidationError if G(mu0) < 0.
GeneratingFunction normalize(const GeneratingFunction& G, std::span<const double> mu0);

}  // namespace fgen
