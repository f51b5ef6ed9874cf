#include "qlp/config.hpp"

#include "qlp/coefficient.hpp"
#include "qlp/errors.hpp"
#include "qlp/norms.hpp"
#include "qlp/scenarios.hpp"

#include <algorithm>
#include <fstream>
#include <cmath>
#include <set>

namespace qlp {

using nlohmann::json;

FixedPointConfig ExperimentConfig::effective_fixed_point() const {
    FixedPointConfig f = fixed_point;
    f.theta = scheme.theta;
    f.max_step = scheme.max_step;
    f.first_step = scheme.first_step;
    f.growth = scheme.growth;
    return f;
}

std::vector<std::string> solver_modes() {
    return {"heat", "linear", "direct", "local", "global", "mollify"};
}

std::vector<std::string> diagnostic_names() {
    return {"range", "hull", "mass", "max_principle", "carleson", "z_gradient", "weak_residual",
            "oracle", "windows", "heat_gradient", "cauchy", "contraction"};
}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& j, const std::string& prefix, std::initializer_list<const char*> keys) {
    if (!j.is_object()) {
        throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
    }
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!allowed.contains(k)) {
            throw ConfigError(join(prefix, k), "unknown key");
        }
    }
}

template <class T>
void read(const json& j, const std::string& prefix, const char* key, T& out) {
    if (!j.contains(key)) {
        return;
    }
    const json& v = j.at(key);
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) {
                throw ConfigError(join(prefix, key), "expected a number");
            }
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_integer()) {
                throw ConfigError(join(prefix, key), "expected an integer");
            }
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                throw ConfigError(join(prefix, key), "expected true or false");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) {
                throw ConfigError(join(prefix, key), "expected a string");
            }
        }
        out = v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(join(prefix, key), e.what());
    }
}

bool power_of_two(int n) {
    return n > 0 && (n & (n - 1)) == 0;
}

} // namespace

ExperimentConfig parse_config(const json& j) {
    reject_unknown(j, "", {"scenario", "mode", "grid", "coefficient", "u0", "horizon", "scheme", "fixed_point",
                           "mollify", "diagnostics", "output_dir", "seed"});
    ExperimentConfig c;
    read(j, "", "scenario", c.scenario);
    read(j, "", "mode", c.mode);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown(g, "grid", {"dim", "N", "L"});
        read(g, "grid", "dim", c.grid.dim);
        read(g, "grid", "N", c.grid.cells);
        read(g, "grid", "L", c.grid.length);
    }
    read(j, "", "coefficient", c.coefficient);
    if (j.contains("u0")) {
        const json& u = j.at("u0");
        if (u.is_string()) {
            c.u0.preset = u.get<std::string>();
        } else {
            reject_unknown(u, "u0", {"preset", "offset", "amplitude"});
            read(u, "u0", "preset", c.u0.preset);
            read(u, "u0", "offset", c.u0.offset);
            read(u, "u0", "amplitude", c.u0.amplitude);
        }
    }
    read(j, "", "horizon", c.horizon);
    if (j.contains("scheme")) {
        const json& s = j.at("scheme");
        reject_unknown(s, "scheme", {"theta", "max_step", "first_step", "growth"});
        read(s, "scheme", "theta", c.scheme.theta);
        read(s, "scheme", "max_step", c.scheme.max_step);
        read(s, "scheme", "first_step", c.scheme.first_step);
        read(s, "scheme", "growth", c.scheme.growth);
    }
    if (j.contains("fixed_point")) {
        const json& f = j.at("fixed_point");
        reject_unknown(f, "fixed_point",
                       {"q", "r", "T", "max_iters", "fp_tol", "contraction_window", "z_samples", "compare_oracle"});
        auto& fp = c.fixed_point;
        if (f.contains("q") && f.at("q").is_string() && f.at("q").get<std::string>() == "inf") {
            fp.q = kInfinity;
        } else {
            read(f, "fixed_point", "q", fp.q);
        }
        read(f, "fixed_point", "r", fp.r);
        read(f, "fixed_point", "T", fp.horizon);
        read(f, "fixed_point", "max_iters", fp.max_iters);
        read(f, "fixed_point", "fp_tol", fp.fp_tol);
        read(f, "fixed_point", "contraction_window", fp.contraction_window);
        read(f, "fixed_point", "z_samples", fp.z_samples);
        read(f, "fixed_point", "compare_oracle", fp.compare_oracle);
    }
    if (j.contains("mollify")) {
        const json& m = j.at("mollify");
        reject_unknown(m, "mollify", {"eps_cells"});
        if (m.contains("eps_cells")) {
            const json& e = m.at("eps_cells");
            if (!e.is_array() || e.empty()) {
                throw ConfigError("mollify.eps_cells", "expected a non-empty array of numbers");
            }
            c.eps_cells.clear();
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (!e[i].is_number()) {
                    throw ConfigError("mollify.eps_cells[" + std::to_string(i) + "]", "expected a number");
                }
                c.eps_cells.push_back(e[i].get<double>());
            }
        }
    }
    if (j.contains("diagnostics")) {
        const json& d = j.at("diagnostics");
        if (!d.is_array()) {
            throw ConfigError("diagnostics", "expected an array");
        }
        for (std::size_t i = 0; i < d.size(); ++i) {
            const std::string path = "diagnostics[" + std::to_string(i) + "]";
            DiagnosticConfig dc;
            if (d[i].is_string()) {
                dc.name = d[i].get<std::string>();
            } else {
                reject_unknown(d[i], path, {"name", "bound"});
                read(d[i], path, "name", dc.name);
                if (d[i].contains("bound")) {
                    double b = 0.0;
                    read(d[i], path, "bound", b);
                    dc.bound = b;
                }
            }
            c.diagnostics.push_back(dc);
        }
    }
    read(j, "", "output_dir", c.output_dir);
    read(j, "", "seed", c.seed);
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open config file");
    }
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["scenario"] = c.scenario;
    j["mode"] = c.mode;
    j["grid"] = {{"dim", c.grid.dim}, {"N", c.grid.cells}, {"L", c.grid.length}};
    j["coefficient"] = c.coefficient;
    j["u0"] = {{"preset", c.u0.preset}, {"offset", c.u0.offset}, {"amplitude", c.u0.amplitude}};
    j["horizon"] = c.horizon;
    j["scheme"] = {{"theta", c.scheme.theta},
                   {"max_step", c.scheme.max_step},
                   {"first_step", c.scheme.first_step},
                   {"growth", c.scheme.growth}};
    const auto& fp = c.fixed_point;
    j["fixed_point"] = {{"r", fp.r},
                        {"T", fp.horizon},
                        {"max_iters", fp.max_iters},
                        {"fp_tol", fp.fp_tol},
                        {"contraction_window", fp.contraction_window},
                        {"z_samples", fp.z_samples},
                        {"compare_oracle", fp.compare_oracle}};
    if (std::isinf(fp.q)) {
        j["fixed_point"]["q"] = "inf";
    } else {
        j["fixed_point"]["q"] = fp.q;
    }
    j["mollify"] = {{"eps_cells", c.eps_cells}};
    j["diagnostics"] = json::array();
    for (const auto& d : c.diagnostics) {
        if (d.bound) {
            j["diagnostics"].push_back({{"name", d.name}, {"bound", *d.bound}});
        } else {
            j["diagnostics"].push_back(d.name);
        }
    }
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

void validate(const ExperimentConfig& c) {
    const auto modes = solver_modes();
    if (std::find(modes.begin(), modes.end(), c.mode) == modes.end()) {
        throw ConfigError("mode", "unknown mode '" + c.mode + "'");
    }
    if (c.grid.dim != 1 && c.grid.dim != 2) {
        throw ConfigError("grid.dim", "must be 1 or 2");
    }
    if (!power_of_two(c.grid.cells)) {
        throw ConfigError("grid.N", "must be a power of two");
    }
    if (!(c.grid.length > 0.0)) {
        throw ConfigError("grid.L", "must be positive");
    }
    if (!(c.horizon > 0.0)) {
        throw ConfigError("horizon", "must be positive");
    }
    const Grid grid(c.grid.dim, c.grid.cells, c.grid.length);
    try {
        make_coefficient(c.coefficient, c.grid.dim, c.grid.length);
    } catch (const Error& e) {
        throw ConfigError("coefficient", e.what());
    }
    try {
        make_datum(grid, c.u0, c.seed);
    } catch (const Error& e) {
        throw ConfigError("u0.preset", e.what());
    }
    c.effective_fixed_point().validate(c.grid.dim);
    for (std::size_t i = 0; i < c.eps_cells.size(); ++i) {
        if (!(c.eps_cells[i] > 0.0) || (i > 0 && !(c.eps_cells[i] < c.eps_cells[i - 1]))) {
            throw ConfigError("mollify.eps_cells", "must be positive and strictly decreasing");
        }
    }
    const auto names = diagnostic_names();
    for (std::size_t i = 0; i < c.diagnostics.size(); ++i) {
        if (std::find(names.begin(), names.end(), c.diagnostics[i].name) == names.end()) {
            throw ConfigError("diagnostics[" + std::to_string(i) + "].name",
                              "unknown diagnostic '" + c.diagnostics[i].name + "'");
        }
    }
    if (c.output_dir.empty()) {
        throw ConfigError("output_dir", "must not be empty");
    }
}

} // namespace qlp
