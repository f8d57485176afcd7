#include "fgen/scenario.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fgen;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scenario(const std::string& name) { return fs::path(FGEN_SCENARIO_DIR) / (name + ".json"); }

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("fgen_test_scenario_" + tag);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& file) {
    std::ifstream is(file, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json small_config() {
    return json::parse(R"({
        "name": "small",
        "model": {"kind": "two_asset_martingale", "initial_caps": [1, 1], "volatility": 1.0},
        "simulation": {"horizon": 4, "steps": 256, "seed": 11, "ensemble_size": 40},
        "generator": {"kind": "entropy"},
        "mode": "both",
        "diagnostics": {"outperformance": {"t_star": [1, 4]}},
        "output": {"csv_paths": 1, "holdings": true, "weights": true}
    })");
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-2.5e-300) == "-2.5e-300");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("config parsing") {
    const auto cfg = parse_scenario(small_config());
    CHECK(cfg.name == "small");
    CHECK(cfg.model.kind == ModelKind::two_asset_martingale);
    CHECK(cfg.simulation.steps == 256);
    CHECK(cfg.outperformance->epsilon == 0.1);
    CHECK_FALSE(cfg.supermartingale.has_value());

    // the resolved config round-trips
    const auto again = parse_scenario(to_json(cfg));
    CHECK(to_json(again) == to_json(cfg));

    auto j = small_config();
    j["model"]["volatilty"] = 1.0;
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);
    j = small_config();
    j["extra"] = 1;
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);
    j = small_config();
    j["simulation"]["steps"] = "many";
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);
    j["simulation"]["steps"] = -5;
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);
    j["simulation"]["steps"] = 128;
    CHECK(parse_scenario(j).simulation.steps == 128);
    j = small_config();
    j["mode"] = "sideways";
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);
    j = small_config();
    j["diagnostics"]["outperformance"]["t_star"] = json::array({5});
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);

    j = small_config();
    j["generator"] = {{"kind", "quadratic"}, {"c", 1.0}};
    try {
        (void)parse_scenario(j);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("c > 1") != std::string::npos);
    }
    j["mode"] = "additive";
    CHECK_NOTHROW(parse_scenario(j));
    j["mode"] = "multiplicative";
    j["generator"]["c"] = 1.5;
    CHECK_NOTHROW(parse_scenario(j));

    for (const auto& entry : fs::directory_iterator(FGEN_SCENARIO_DIR)) CHECK_NOTHROW(load_scenario(entry.path()));
    CHECK_THROWS_AS(load_scenario(scenario("does_not_exist")), ValidationError);
}

TEST_CASE("packaged entropy scenario runs end to end") {
    const auto dir = fresh_dir("entropy");
    auto cfg = load_scenario(scenario("entropy_two_asset"));
    cfg.simulation.ensemble_size = 20;
    cfg.simulation.steps = 1024;
    const auto res = run_command("generate", cfg, {.out_dir = dir});
    CHECK(fs::exists(dir / "entropy_two_asset_path0.csv"));
    CHECK(fs::exists(dir / "entropy_two_asset_path1.csv"));
    CHECK(fs::exists(dir / "entropy_two_asset_generate_summary.json"));

    const auto summary = json::parse(slurp(dir / "entropy_two_asset_generate_summary.json"));
    CHECK(summary.at("seed").get<std::uint64_t>() == 20240601);
    CHECK(summary.at("config").at("simulation").at("steps").get<int>() == 1024);
    CHECK(summary.at("residuals").at("additive_value_identity").get<double>() <= 1e-12);
    CHECK(summary.at("residuals").at("additive_self_financing").get<double>() <= 1e-12);
    CHECK(summary.at("residuals").at("portfolio_weight_sum").get<double>() <= 1e-10);
    CHECK(summary.at("supermartingale").at("nonincreasing").get<bool>());

    const std::string csv = slurp(dir / "entropy_two_asset_path0.csv");
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header == "t,mu_1,mu_2,gamma,v_additive,v_multiplicative,phi_1,phi_2,psi_1,psi_2,pi_1,pi_2");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1026);

    const auto out = run_command("outperform", cfg, {.out_dir = dir});
    const auto s = json::parse(slurp(dir / "entropy_two_asset_outperform_summary.json"));
    CHECK(s.at("outperformance").size() == 10);  // 5 horizons x 2 modes
    CHECK(fs::exists(dir / "entropy_two_asset_outperformance.csv"));
}

TEST_CASE("reruns are byte-identical") {
    const auto cfg = parse_scenario(small_config());
    const auto a = fresh_dir("rerun_a");
    const auto b = fresh_dir("rerun_b");
    run_command("generate", cfg, {.out_dir = a, .threads = 1});
    run_command("generate", cfg, {.out_dir = b, .threads = 3});
    run_command("simulate", cfg, {.out_dir = a});
    run_command("simulate", cfg, {.out_dir = b});
    for (const char* f : {"small_path0.csv", "small_simulate_path0.csv"}) {
        const std::string x = slurp(a / f);
        CHECK_FALSE(x.empty());
        CHECK(x == slurp(b / f));
    }
    const auto c = fresh_dir("rerun_c");
    run_command("generate", cfg, {.out_dir = c, .seed_override = 12});
    CHECK(slurp(c / "small_path0.csv") != slurp(a / "small_path0.csv"));
    CHECK(json::parse(slurp(c / "small_generate_summary.json")).at("seed").get<int>() == 12);
}

TEST_CASE("runtime failures and unknown commands") {
    auto j = small_config();
    j["model"] = {{"kind", "absorbed_brownian_pair"}, {"volatility", 1.0}};
    j["simulation"] = {{"horizon", 20}, {"steps", 2000}, {"seed", 1}, {"ensemble_size", 10}};
    j["mode"] = "multiplicative";
    j["diagnostics"] = json::object();
    const auto cfg = parse_scenario(j);
    CHECK_THROWS_AS(run_command("transmogrify", cfg, {.out_dir = fresh_dir("bad")}), ValidationError);
    // the entropy hits zero once a weight is absorbed
    CHECK_THROWS_AS(run_command("generate", cfg, {.out_dir = fresh_dir("bad")}), NumericalError);
}

TEST_CASE("output directory resolution") {
    CHECK(resolve_out_dir("given") == fs::path("given"));
    ::setenv("FGEN_OUT_DIR", "/tmp/from_env", 1);
    CHECK(resolve_out_dir("") == fs::path("/tmp/from_env"));
    ::unsetenv("FGEN_OUT_DIR");
    CHECK(resolve_out_dir("") == fs::path("out"));
}

TEST_CASE("report aggregation") {
    CHECK_THROWS_AS(run_report({}, {.out_dir = fresh_dir("report_empty")}), ValidationError);

    const auto dir = fresh_dir("report");
    auto cfg = parse_scenario(small_config());
    cfg.simulation.ensemble_size = 200;
    cfg.mode = GenerationMode::additive;
    cfg.name = "seed_a";
    run_command("outperform", cfg, {.out_dir = dir});
    cfg.name = "seed_b";
    run_command("outperform", cfg, {.out_dir = dir, .seed_override = 99});

    const auto single = run_report({dir / "seed_a_outperform_summary.json"}, {.out_dir = dir / "single"});
    const auto a = json::parse(slurp(dir / "seed_a_outperform_summary.json"));
    const auto& pooled = single.summary.at("pooled_outperformance");
    REQUIRE(pooled.size() == a.at("outperformance").size());
    for (std::size_t k = 0; k < pooled.size(); ++k)
        CHECK(pooled[k].at("fraction_condition").get<double>() ==
              a.at("outperformance")[k].at("fraction_condition").get<double>());

    const auto both = run_report({dir / "seed_a_outperform_summary.json", dir / "seed_b_outperform_summary.json"},
                                 {.out_dir = dir / "both"});
    const auto b = json::parse(slurp(dir / "seed_b_outperform_summary.json"));
    CHECK(both.summary.at("scenarios").size() == 2);
    for (std::size_t k = 0; k < a.at("outperformance").size(); ++k) {
        // two independent 200-path estimates of the same fraction agree within 3 pooled SE
        const double pa = a.at("outperformance")[k].at("fraction_condition").get<double>();
        const double pb = b.at("outperformance")[k].at("fraction_condition").get<double>();
        const double p = 0.5 * (pa + pb);
        const double se = std::sqrt(std::max(p * (1 - p), 1e-4) * (2.0 / 200.0));
        CHECK(std::abs(pa - pb) <= 3.0 * se);
    }
    CHECK(fs::exists(dir / "both" / "report.csv"));

    std::ofstream(dir / "broken.json") << "{\"command\": 1";
    try {
        (void)run_report({dir / "broken.json"}, {.out_dir = dir / "x"});
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("broken.json") != std::string::npos);
    }
}
