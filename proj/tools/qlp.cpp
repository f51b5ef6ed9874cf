// Command-line front end: run, suite, inspect, diff, scenario.
#include "qlp/errors.hpp"
#include "qlp/runner.hpp"
#include "qlp/scenarios.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Quasilinear parabolic solver and verification harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    auto* run = app.add_subcommand("run", "Run one experiment config");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_option("-o,--output-dir", output_dir, "Output root (overrides QLP_OUTPUT_DIR and the config)");

    std::string suite_name;
    int workers = 0;
    auto* suite = app.add_subcommand("suite", "Run a named suite and print its table");
    suite->add_option("name", suite_name, "acceptance, invariants or convergence")->required();
    suite->add_option("-j,--workers", workers, "Worker threads (default QLP_WORKERS or hardware)");
    suite->add_option("-o,--output-dir", output_dir, "Output root");

    std::string manifest_path;
    auto* inspect = app.add_subcommand("inspect", "Pretty-print a run manifest");
    inspect->add_option("manifest", manifest_path, "manifest.json")->required();

    std::string left;
    std::string right;
    double rtol = 1e-9;
    double atol = 1e-12;
    auto* diff = app.add_subcommand("diff", "Compare the diagnostic values of two manifests");
    diff->add_option("first", left)->required();
    diff->add_option("second", right)->required();
    diff->add_option("--rtol", rtol, "Relative tolerance");
    diff->add_option("--atol", atol, "Absolute tolerance");

    std::string scenario_name;
    auto* scenario = app.add_subcommand("scenario", "Print a built-in scenario as a config file, or list them");
    scenario->add_option("name", scenario_name, "Scenario name; omit to list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : qlp::kExitConfigError;
    }

    auto root = [&]() -> std::optional<fs::path> {
        if (!output_dir.empty()) {
            return fs::path(output_dir);
        }
        return qlp::output_root_from_env();
    };

    try {
        if (*run) {
            const qlp::RunOutcome r = qlp::run_config_file(config_path, root());
            if (!r.error.empty()) {
                std::cerr << "error: " << r.error << '\n';
            }
            for (const auto& d : r.diagnostics) {
                std::cout << d.name << ' ' << d.value << ' ' << d.relation << ' ' << d.bound << ' '
                          << (d.pass ? "pass" : "FAIL") << '\n';
            }
            if (!r.directory.empty() && r.exit_code != qlp::kExitConfigError) {
                std::cout << "manifest: " << (r.directory / "manifest.json").string() << '\n';
            }
            return r.exit_code;
        }
        if (*suite) {
            const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
            const int n = workers > 0 ? workers : qlp::workers_from_env(hw);
            const qlp::SuiteOutcome s = qlp::run_suite(suite_name, n, root().value_or("qlp_out"));
            qlp::print_suite_table(std::cout, s);
            if (!s.errors.empty()) {
                return qlp::kExitSolverError;
            }
            return s.pass ? qlp::kExitPass : qlp::kExitDiagnosticFailure;
        }
        if (*inspect) {
            qlp::print_manifest(std::cout, qlp::load_manifest(manifest_path));
            return 0;
        }
        if (*diff) {
            const auto d = qlp::diff_manifests(qlp::load_manifest(left), qlp::load_manifest(right), rtol, atol);
            for (const auto& l : d.lines) {
                std::cout << l << '\n';
            }
            return d.within_tolerance ? qlp::kExitPass : qlp::kExitDiagnosticFailure;
        }
        if (*scenario) {
            if (scenario_name.empty()) {
                for (const auto& [name, cfg] : qlp::scenario_library()) {
                    std::cout << name << "  (" << cfg.mode << ", " << cfg.coefficient << ")\n";
                }
                return 0;
            }
            std::cout << qlp::to_json(qlp::library_scenario(scenario_name)).dump(2) << '\n';
            return 0;
        }
    } catch (const qlp::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return qlp::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return qlp::kExitSolverError;
    }
    return 0;
}
