#include "qlp/scenarios.hpp"

#include "qlp/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qlp {

namespace {

std::pair<std::string, std::string> split_label(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        return {s, ""};
    }
    return {s.substr(0, colon), s.substr(colon + 1)};
}

double parse_number(const std::string& preset, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw Error("preset '" + preset + "' needs a numeric parameter");
}

// Minimal-image offset of x from the box centre along one axis.
double centred(double x, double length) {
    double d = x - 0.5 * length;
    d -= length * std::round(d / length);
    return d;
}

} // namespace

ScalarField make_datum(const Grid& grid, const DatumConfig& d, std::uint64_t seed) {
    const auto [kind, param] = split_label(d.preset);
    const double len = grid.box_length();
    const double k = 2.0 * std::numbers::pi / len;
    const bool two = grid.dim() == 2;
    std::function<double(Point)> shape;
    if (kind == "cos") {
        shape = [k, two](Point x) { return std::cos(k * x.x) * (two ? std::cos(k * x.y) : 1.0); };
    } else if (kind == "sin") {
        shape = [k, two](Point x) { return std::sin(k * x.x) * (two ? std::sin(k * x.y) : 1.0); };
    } else if (kind == "step") {
        shape = [len](Point x) { return x.x < 0.5 * len ? 0.0 : 1.0; };
    } else if (kind == "sign") {
        // +1 on |x0 - L/2| < L/4, -1 outside, interfaces smoothed over delta L.
        const double delta = parse_number(d.preset, param);
        if (!(delta > 0.0)) {
            throw Error("sign preset needs a positive width");
        }
        shape = [len, delta](Point x) { return std::tanh((0.25 * len - std::abs(centred(x.x, len))) / (delta * len)); };
    } else if (kind == "bump") {
        const double c = parse_number(d.preset, param);
        if (!(c > 0.0)) {
            throw Error("bump preset needs a positive width");
        }
        shape = [len, c, two](Point x) {
            const double rx = centred(x.x, len);
            const double ry = two ? centred(x.y, len) : 0.0;
            return std::exp(-(rx * rx + ry * ry) / (c * c * len * len));
        };
    } else if (kind == "random_bandlimited") {
        const auto s = static_cast<std::uint64_t>(parse_number(d.preset, param));
        std::mt19937_64 rng(s ^ seed);
        std::normal_distribution<double> normal;
        constexpr int kMax = 4;
        struct Mode {
            int m0;
            int m1;
            double c;
            double s;
        };
        std::vector<Mode> modes;
        for (int m1 = two ? -kMax : 0; m1 <= (two ? kMax : 0); ++m1) {
            for (int m0 = 0; m0 <= kMax; ++m0) {
                if ((m0 == 0 && m1 <= 0) || m0 * m0 + m1 * m1 > kMax * kMax) {
                    continue;
                }
                const double c = normal(rng);
                const double sn = normal(rng);
                modes.push_back({m0, m1, c, sn});
            }
        }
        auto raw = [modes, k](Point x) {
            double v = 0.0;
            for (const Mode& m : modes) {
                const double a = k * (m.m0 * x.x + m.m1 * x.y);
                v += m.c * std::cos(a) + m.s * std::sin(a);
            }
            return v;
        };
        const ScalarField unscaled = ScalarField::from_function(grid, raw);
        const double sup = unscaled.sup_norm();
        shape = [raw, sup](Point x) { return raw(x) / sup; };
    } else if (kind == "zero") {
        shape = [](Point) { return 0.0; };
    } else {
        throw Error("unknown initial datum preset '" + d.preset + "'");
    }
    return ScalarField::from_function(grid, [&](Point x) { return d.offset + d.amplitude * shape(x); });
}

namespace {

ExperimentConfig base(const std::string& name, const std::string& mode, const std::string& coefficient) {
    ExperimentConfig c;
    c.scenario = name;
    c.mode = mode;
    c.coefficient = coefficient;
    c.output_dir = "qlp_out/" + name;
    return c;
}

std::vector<DiagnosticConfig> diags(std::initializer_list<const char*> names) {
    std::vector<DiagnosticConfig> out;
    for (const char* n : names) {
        out.push_back({n, std::nullopt});
    }
    return out;
}

std::map<std::string, ExperimentConfig> build_library() {
    std::map<std::string, ExperimentConfig> lib;
    auto add = [&lib](ExperimentConfig c) { lib.emplace(c.scenario, std::move(c)); };

    {
        auto c = base("heat_smoke", "heat", "identity");
        c.grid.cells = 64;
        c.horizon = 0.05;
        c.scheme.max_step = 1e-3;
        c.diagnostics = diags({"range", "mass", "max_principle", "heat_gradient"});
        add(c);
    }
    {
        auto c = base("sign_heat", "heat", "identity");
        c.grid.cells = 512;
        c.u0.preset = "sign:0.001";
        c.horizon = (1.0 / 64.0) * (1.0 / 64.0);
        c.scheme.max_step = 1e-5;
        c.diagnostics = diags({"heat_gradient"});
        add(c);
    }
    {
        auto c = base("bandlimited_heat", "heat", "identity");
        c.u0.preset = "random_bandlimited:7";
        c.horizon = 0.01;
        c.scheme.max_step = 1e-4;
        c.diagnostics = diags({"heat_gradient", "range", "mass"});
        add(c);
    }
    {
        auto c = base("bump_heat_2d", "heat", "identity");
        c.grid = {2, 64, 1.0};
        c.u0.preset = "bump:0.1";
        c.horizon = 0.01;
        c.scheme.max_step = 5e-4;
        c.diagnostics = diags({"heat_gradient", "range", "mass"});
        add(c);
    }
    {
        auto c = base("linear_wavy", "linear", "wavy:2");
        c.horizon = 0.05;
        c.scheme.max_step = 5e-4;
        c.diagnostics = diags({"range", "hull", "mass", "max_principle", "carleson", "weak_residual"});
        add(c);
    }
    {
        auto c = base("linear_anisotropic_2d", "linear", "anisotropic:0.5");
        c.grid = {2, 32, 1.0};
        c.horizon = 0.01;
        c.scheme.max_step = 5e-4;
        c.diagnostics = diags({"mass", "max_principle", "weak_residual"});
        add(c);
    }
    {
        auto c = base("time_ramp_direct", "direct", "time_ramp:1");
        c.horizon = 0.05;
        c.scheme.max_step = 5e-4;
        c.diagnostics = diags({"range", "mass", "max_principle", "weak_residual"});
        add(c);
    }
    for (int m : {1, 2}) {
        auto c = base(m == 1 ? "porous_local" : "porous2_local", "local", m == 1 ? "porous:1" : "porous:2");
        c.u0 = {"cos", 1.0, 0.1};
        c.fixed_point.horizon = 0.005;
        c.horizon = 0.005;
        c.diagnostics = diags({"oracle", "contraction", "range", "mass", "weak_residual", "z_gradient"});
        add(c);
    }
    {
        auto c = base("porous_global", "global", "porous:1");
        c.u0 = {"cos", 1.0, 0.1};
        c.horizon = 0.5;
        c.fixed_point.horizon = 0.05;
        c.scheme.max_step = 5e-4;
        c.diagnostics = diags({"windows", "oracle", "range", "hull", "mass", "contraction"});
        add(c);
    }
    {
        auto c = base("constant_porous", "global", "porous:1");
        c.u0 = {"zero", 1.5, 0.0};
        c.horizon = 0.05;
        c.fixed_point.horizon = 0.025;
        c.scheme.max_step = 5e-4;
        c.diagnostics = diags({"range", "max_principle", "windows"});
        add(c);
    }
    {
        auto c = base("mollify_step", "mollify", "porous:1");
        c.u0 = {"step", 1.0, 1.0};
        c.horizon = 0.02;
        c.fixed_point.horizon = 0.01;
        c.scheme.max_step = 2e-4;
        c.eps_cells = {8.0, 4.0, 2.0};
        c.diagnostics = diags({"cauchy", "max_principle", "range"});
        add(c);
    }
    return lib;
}

} // namespace

const std::map<std::string, ExperimentConfig>& scenario_library() {
    static const std::map<std::string, ExperimentConfig> lib = build_library();
    return lib;
}

ExperimentConfig library_scenario(const std::string& name) {
    const auto& lib = scenario_library();
    const auto it = lib.find(name);
    if (it == lib.end()) {
        std::string known;
        for (const auto& [k, v] : lib) {
            known += (known.empty() ? "" : ", ") + k;
        }
        throw ConfigError("scenario", "unknown scenario '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

} // namespace qlp
