// Command-line front end. Talks to the engine only through the C API.

#include "fgen/fgen.h"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct RunArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
    cmd->add_option("--config", args.config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out, "Output directory (default: $FGEN_OUT_DIR, else ./out)");
    cmd->add_option("--seed-override", args.seed, "Replace simulation.seed");
    cmd->add_option("--threads", args.threads, "Worker threads for ensembles")->check(CLI::PositiveNumber);
}

int finish(fgen_status status) {
    if (status != FGEN_OK) {
        std::cerr << "error: " << fgen_last_error() << "\n";
        // argument errors only arise from malformed inputs at this level
        return status == FGEN_ERR_ARGUMENT ? FGEN_ERR_VALIDATION : static_cast<int>(status);
    }
    std::cout << fgen_last_artifacts();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate and verify functionally generated trading strategies"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fgen_version()));

    RunArgs run;
    const std::vector<std::pair<const char*, const char*>> commands{
        {"simulate", "Simulate market paths and write weights/capitalizations"},
        {"generate", "Build additive/multiplicative strategies and check identities"},
        {"outperform", "Check outperformance conditions over an ensemble"},
        {"counterexample", "Variation report for the oscillator and sqrt|1-B| fixtures"},
    };
    std::vector<CLI::App*> run_cmds;
    for (const auto& [name, help] : commands) {
        auto* cmd = app.add_subcommand(name, help);
        add_run_options(cmd, run);
        run_cmds.push_back(cmd);
    }

    std::vector<std::string> summaries;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Aggregate summary JSON files");
    report->add_option("summaries", summaries, "Summary files written by other subcommands")->required();
    report->add_option("--out", report_out, "Output directory (default: $FGEN_OUT_DIR, else ./out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : FGEN_ERR_VALIDATION;
    }

    if (report->parsed()) {
        std::vector<const char*> files;
        for (const auto& s : summaries) files.push_back(s.c_str());
        return finish(fgen_run_report(files.data(), files.size(), report_out.empty() ? nullptr : report_out.c_str()));
    }
    for (auto* cmd : run_cmds) {
        if (!cmd->parsed()) continue;
        const std::uint64_t seed = run.seed.value_or(0);
        return finish(fgen_run_command(cmd->get_name().c_str(), run.config.c_str(),
                                       run.out.empty() ? nullptr : run.out.c_str(), run.seed ? &seed : nullptr,
                                       run.threads));
    }
    return FGEN_ERR_VALIDATION;
}
