#pragma once

#include "qlp/config.hpp"
#include "qlp/field.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace qlp {

/// Initial datum from a preset (see DatumConfig). Throws Error on unknown presets.
ScalarField make_datum(const Grid& grid, const DatumConfig& d, std::uint64_t seed = 0);

/// Built-in experiments by name.
const std::map<std::string, ExperimentConfig>& scenario_library();
ExperimentConfig library_scenario(const std::string& name);

} // namespace qlp
