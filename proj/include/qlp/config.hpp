#pragma once

#include "qlp/quasilinear.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qlp {

struct GridConfig {
    int dim = 1;
    int cells = 128;
    double length = 1.0;
};

/// u0 = offset + amplitude * shape, shape given by the preset:
///   cos, step, sign:delta, bump:c, random_bandlimited:seed, zero.
struct DatumConfig {
    std::string preset = "cos";
    double offset = 0.0;
    double amplitude = 1.0;
};

struct SchemeConfig {
    double theta = 1.0;
    double max_step = 1e-4;
    double first_step = 1e-6;
    double growth = 1.1;
};

struct DiagnosticConfig {
    std::string name;
    std::optional<double> bound;  ///< overrides the diagnostic's default bound
};

/// One experiment. mode selects the solver path:
///   heat, linear, direct, local, global, mollify.
struct ExperimentConfig {
    std::string scenario = "unnamed";
    std::string mode = "global";
    GridConfig grid;
    std::string coefficient = "identity";
    DatumConfig u0;
    double horizon = 0.1;
    SchemeConfig scheme;
    FixedPointConfig fixed_point;  ///< time-grid fields are overwritten from scheme
    std::vector<double> eps_cells{8.0, 4.0, 2.0};
    std::vector<DiagnosticConfig> diagnostics;
    std::string output_dir = "qlp_out";
    std::uint64_t seed = 0;

    /// Fixed-point settings with the scheme's time-grid fields applied.
    FixedPointConfig effective_fixed_point() const;
};

/// Throws ConfigError naming the offending field ("fixed_point.q", "grid.N", ...).
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& c);

/// Structural checks that need more than one field (labels resolve, N a power of two, q > n + 2).
void validate(const ExperimentConfig& c);

std::vector<std::string> solver_modes();
std::vector<std::string> diagnostic_names();

} // namespace qlp
