#pragma once

// Declarative experiments: JSON scenario configs, the subcommands that run
// them, and the CSV/JSON artifacts they write.

#include "fgen/diagnostics.hpp"
#include "fgen/generators.hpp"
#include "fgen/market_models.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fgen {

enum class GenerationMode { additive, multiplicative, both };

std::string to_string(GenerationMode mode);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::entropy;
    GeneratorParams params;
    bool normalize = true;
};

struct OutperformanceSpec {
    std::vector<double> t_star;
    double epsilon = 0.1;
};

struct SupermartingaleSpec {
    std::size_t checkpoints = 4;
};

struct CounterexampleSpec {
    std::vector<std::size_t> n_max{100, 1000, 10000};
    std::size_t qv_paths = 0;
    std::size_t qv_steps = 256;
};

struct OutputSpec {
    std::size_t csv_paths = 1;  // number of leading paths written as CSV
    bool holdings = false;      // phi_* / psi_* columns
    bool weights = false;       // pi_* columns
};

struct ScenarioConfig {
    std::string name = "scenario";
    ModelSpec model;
    SimConfig simulation;
    GeneratorSpec generator;
    GenerationMode mode = GenerationMode::both;
    std::optional<OutperformanceSpec> outperformance;
    std::optional<SupermartingaleSpec> supermartingale;
    std::optional<CounterexampleSpec> counterexample;
    OutputSpec output;

    /// Cross-field checks on top of ModelSpec/SimConfig validation, e.g. the
    /// quadratic function needs c > 1 when generating multiplicatively.
    void validate() const;
};

/// Strict parse: unknown keys, wrong types and out-of-range values raise
/// ValidationError.
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Fully resolved config (all defaults spelled out).
nlohmann::json to_json(const ScenarioConfig& config);

struct RunOptions {
    std::filesystem::path out_dir;  // empty: $FGEN_OUT_DIR, else "out"
    std::optional<std::uint64_t> seed_override;
    unsigned threads = 1;
};

struct RunResult {
    std::vector<std::filesystem::path> artifacts;
    nlohmann::json summary;
};

/// Runs one subcommand: simulate, generate, outperform, counterexample.
/// Throws ValidationError for config problems and NumericalError or other
/// runtime errors for failures during the computation.
RunResult run_command(const std::string& command, const ScenarioConfig& config, const RunOptions& options);

/// Aggregates summary files written by run_command into report.json and
/// report.csv.
RunResult run_report(const std::vector<std::filesystem::path>& summaries, const RunOptions& options);

std::filesystem::path resolve_out_dir(const std::filesystem::path& requested);

/// Locale-independent, 17 significant digits; non-finite values print as
/// nan / inf / -inf.
std::string format_number(double v);

}  // namespace fgen
