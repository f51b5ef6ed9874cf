#pragma once

#include "qlp/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qlp {

/// Exit codes of run and suite.
enum ExitCode : int { kExitPass = 0, kExitDiagnosticFailure = 1, kExitConfigError = 2, kExitSolverError = 3 };

struct DiagnosticResult {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    std::string relation = "<=";  ///< how value is compared with bound: "<=", ">=", "~0.3"
    bool pass = false;
    std::string note;
};

/// Solver output of one experiment before diagnostics.
struct ScenarioRun {
    ScalarField u0;
    SpaceTimeField u;
    SpaceTimeField grad;
    SpaceTimeField flux;
    std::optional<SolveReport> report;
    std::optional<MollifyReport> mollify;
    bool diagonal = true;
    double theta = 1.0;
};

/// Builds grid, coefficient and datum from cfg and runs the solver its mode selects.
ScenarioRun solve_scenario(const ExperimentConfig& cfg);

struct RunOutcome {
    int exit_code = kExitPass;
    std::string error;
    std::vector<DiagnosticResult> diagnostics;
    nlohmann::json manifest;
    std::filesystem::path directory;
};

/// Runs one experiment and writes its artifacts and manifest.json into
/// output_root / scenario when output_root is given, else into cfg.output_dir.
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& output_root = {});

/// Loads, validates and runs a config file; config problems give exit code 2.
RunOutcome run_config_file(const std::filesystem::path& path,
                           const std::optional<std::filesystem::path>& output_root = {});

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_file(const std::filesystem::path& path);

struct SuiteRow {
    std::string member;
    DiagnosticResult result;
};

struct SuiteOutcome {
    std::string name;
    std::vector<SuiteRow> rows;
    std::vector<std::string> errors;  ///< members that did not finish
    bool pass = true;
};

std::vector<std::string> suite_names();

/// Throws ConfigError listing the available suites when the name is unknown.
SuiteOutcome run_suite(const std::string& name, int workers, const std::filesystem::path& output_root);

void print_suite_table(std::ostream& os, const SuiteOutcome& s);

/// QLP_WORKERS if set and positive, else the fallback.
int workers_from_env(int fallback);
/// QLP_OUTPUT_DIR if set.
std::optional<std::filesystem::path> output_root_from_env();

nlohmann::json load_manifest(const std::filesystem::path& path);
void print_manifest(std::ostream& os, const nlohmann::json& manifest);

struct ManifestDiff {
    std::vector<std::string> lines;
    bool within_tolerance = true;
};
/// Compares diagnostic values by name: |a - b| <= atol + rtol |b|.
ManifestDiff diff_manifests(const nlohmann::json& a, const nlohmann::json& b, double rtol, double atol);

} // namespace qlp
