#include "qlp/runner.hpp"

#include "qlp/diagnostics.hpp"
#include "qlp/errors.hpp"
#include "qlp/field_io.hpp"
#include "qlp/heat.hpp"
#include "qlp/manufactured.hpp"
#include "qlp/norms.hpp"
#include "qlp/scenarios.hpp"
#include "qlp/time_grid.hpp"
#include "qlp/weak_form.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace qlp {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(std::span<const unsigned char> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return os.str();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

ScenarioRun solve_scenario(const ExperimentConfig& cfg) {
    const Grid grid(cfg.grid.dim, cfg.grid.cells, cfg.grid.length);
    const CoefficientFn a = make_coefficient(cfg.coefficient, cfg.grid.dim, cfg.grid.length);
    const FixedPointConfig fp = cfg.effective_fixed_point();
    ScenarioRun d;
    d.u0 = make_datum(grid, cfg.u0, cfg.seed);
    d.theta = cfg.scheme.theta;
    d.diagonal = a.traits().diagonal;
    const std::vector<double> times = fp.window_times(cfg.horizon);

    if (cfg.mode == "heat") {
        HeatExtension h = heat_extend(d.u0, times, GradientPlacement::Faces);
        d.u = std::move(h.frames);
        d.grad = h.gradient;
        d.flux = std::move(h.gradient);
        d.theta = 1.0;
    } else if (cfg.mode == "linear") {
        if (!a.traits().state_independent) {
            throw ConfigError("coefficient", "mode 'linear' needs a state-independent coefficient");
        }
        LinearProblem p;
        p.u0 = d.u0;
        p.times = times;
        p.theta = cfg.scheme.theta;
        p.time_constant_coefficient = a.traits().time_independent;
        p.coefficient = [a, u0 = d.u0, times](std::size_t k) { return compose_coefficient(a, times[k], u0); };
        LinearSolution s = solve_linear(p);
        d.u = std::move(s.u);
        d.grad = std::move(s.grad_u);
        d.flux = std::move(s.flux);
    } else if (cfg.mode == "direct") {
        QuasilinearSolution s = direct_solve(d.u0, a, times, cfg.scheme.theta);
        d.u = std::move(s.u);
        d.grad = std::move(s.grad_u);
        d.flux = std::move(s.flux);
    } else if (cfg.mode == "local" || cfg.mode == "global") {
        auto [s, rep] = cfg.mode == "local" ? local_solve_fixed_point(d.u0, a, fp) : global_solve(d.u0, a, cfg.horizon, fp);
        d.u = std::move(s.u);
        d.grad = std::move(s.grad_u);
        d.flux = std::move(s.flux);
        d.report = std::move(rep);
    } else if (cfg.mode == "mollify") {
        std::vector<double> eps;
        for (double e : cfg.eps_cells) {
            eps.push_back(e * grid.spacing());
        }
        MollifyReport m = mollify_solve(d.u0, a, eps, cfg.horizon, fp);
        const auto& last = m.runs.back();
        d.u = last.solution.u;
        d.grad = last.solution.grad_u;
        d.flux = last.solution.flux;
        d.report = last.report;
        d.mollify = std::move(m);
    } else {
        throw ConfigError("mode", "unknown mode '" + cfg.mode + "'");
    }
    return d;
}

namespace {

DiagnosticResult evaluate(const std::string& name, std::optional<double> bound_override, const ExperimentConfig& cfg,
                          const ScenarioRun& d) {
    DiagnosticResult r;
    r.name = name;
    const double u0_sup = d.u0.sup_norm();
    const double scale = std::max(u0_sup, 1.0);
    auto finish = [&](double value, double bound, const std::string& relation = "<=") {
        r.value = value;
        r.bound = bound_override.value_or(bound);
        r.relation = relation;
        r.pass = relation == ">=" ? value >= r.bound : value <= r.bound;
        r.pass = r.pass && std::isfinite(value);
        return r;
    };
    const bool monotone = d.diagonal && d.theta == 1.0;
    if (name == "range" || name == "hull") {
        const double rel = monotone ? 1e-8 : max_principle_tolerance(d.diagonal, d.theta);
        const RangeReport rr = range_invariance(d.u, d.u0, rel);
        if (name == "range") {
            return finish(rr.excess, rr.containment_tolerance);
        }
        return finish(rr.inner_gap, rr.equality_slack);
    }
    if (name == "mass") {
        const ScalarField last = d.u.scalar(d.u.frame_count() - 1);
        return finish(std::abs(last.mean() - d.u0.mean()), 1e-10 * scale);
    }
    if (name == "max_principle") {
        const double tol = max_principle_tolerance(d.diagonal, d.theta);
        return finish(d.u.sup_norm() - u0_sup, tol * u0_sup + 1e-14);
    }
    if (name == "carleson") {
        const CarlesonReport c = carleson(d.grad, u0_sup);
        return finish(c.bound_ratio, 2.0);
    }
    if (name == "z_gradient") {
        const ZNormResult z = z_norm(d.grad, {cfg.fixed_point.q, d.u.times().back(), {}});
        const bool fp = cfg.mode == "local" || cfg.mode == "global";
        return finish(z.value, fp ? cfg.fixed_point.r : kInfinity);
    }
    if (name == "weak_residual") {
        const double t_end = d.u.times().back();
        const auto tests = default_test_functions(d.u.grid(), 0.1 * t_end, 0.9 * t_end);
        return finish(weak_residual(d.u, d.flux, tests).max_normalised, 1e-3 * scale);
    }
    if (name == "oracle") {
        if (!d.report || std::isnan(d.report->oracle_gap)) {
            r.note = "no oracle comparison in this mode";
            return finish(kInfinity, 0.0);
        }
        return finish(d.report->oracle_gap, 1e-6 * scale);
    }
    if (name == "windows") {
        return finish(d.report ? static_cast<double>(d.report->windows.size()) : 0.0, 1.0, ">=");
    }
    if (name == "contraction") {
        if (!d.report) {
            r.note = "no fixed-point iteration in this mode";
            return finish(kInfinity, 1.0);
        }
        r = finish(d.report->max_contraction_factor(), 1.0);
        r.pass = r.value < r.bound;
        return r;
    }
    if (name == "heat_gradient") {
        const HeatGradientSup h = heat_gradient_sup(d.u0, d.u.times().back());
        if (u0_sup == 0.0) {
            return finish(0.0, 0.0);
        }
        return finish(h.value / u0_sup, h.bound / u0_sup);
    }
    if (name == "cauchy") {
        if (!d.mollify) {
            r.note = "only available in mollify mode";
            return finish(kInfinity, 1.0);
        }
        const auto& c = d.mollify->consecutive;
        if (c.size() < 2) {
            r = finish(0.0, 1.0);
            r.note = "needs at least three eps values";
            return r;
        }
        r = finish(c.back() / c.front(), 1.0);
        r.pass = d.mollify->cauchy_monotone;
        return r;
    }
    throw ConfigError("diagnostics", "unknown diagnostic '" + name + "'");
}

json diagnostics_json(const std::vector<DiagnosticResult>& ds) {
    json arr = json::array();
    for (const auto& d : ds) {
        json e{{"name", d.name}, {"value", d.value}, {"bound", d.bound}, {"relation", d.relation}, {"pass", d.pass}};
        if (!std::isfinite(d.value)) {
            e["value"] = d.value > 0 ? "inf" : "nan";
        }
        if (!std::isfinite(d.bound)) {
            e["bound"] = "inf";
        }
        if (!d.note.empty()) {
            e["note"] = d.note;
        }
        arr.push_back(e);
    }
    return arr;
}

std::string hash_string(const std::string& s) {
    return sha256_hex(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::trunc);
    out << s;
    if (!out) {
        throw Error("cannot write " + p.string());
    }
}

} // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::optional<fs::path>& output_root) {
    RunOutcome out;
    out.directory = output_root ? *output_root / cfg.scenario : fs::path(cfg.output_dir);
    const json config = to_json(cfg);
    out.manifest["scenario"] = cfg.scenario;
    out.manifest["config"] = config;
    out.manifest["config_hash"] = hash_string(config.dump());
    const auto start = std::chrono::steady_clock::now();
    try {
        validate(cfg);
        fs::create_directories(out.directory);
        const ScenarioRun d = solve_scenario(cfg);
        for (const auto& dc : cfg.diagnostics) {
            out.diagnostics.push_back(evaluate(dc.name, dc.bound, cfg, d));
        }

        std::vector<std::pair<std::string, fs::path>> artifacts;
        const fs::path field = out.directory / "u.qlpf";
        write_field(field, d.u);
        artifacts.emplace_back("u.qlpf", field);
        const fs::path final_csv = out.directory / "u_final.csv";
        write_field_csv(final_csv, d.u, d.u.frame_count());
        artifacts.emplace_back("u_final.csv", final_csv);
        if (d.mollify) {
            for (std::size_t i = 0; i < d.mollify->runs.size(); ++i) {
                const std::string name = "u_eps" + std::to_string(i) + ".qlpf";
                write_field(out.directory / name, d.mollify->runs[i].solution.u);
                artifacts.emplace_back(name, out.directory / name);
            }
        }
        std::ostringstream diag_csv;
        diag_csv.precision(17);
        diag_csv << "name,value,bound,relation,pass\n";
        for (const auto& r : out.diagnostics) {
            diag_csv << r.name << ',' << r.value << ',' << r.bound << ',' << r.relation << ',' << (r.pass ? 1 : 0)
                     << '\n';
        }
        write_text(out.directory / "diagnostics.csv", diag_csv.str());
        artifacts.emplace_back("diagnostics.csv", out.directory / "diagnostics.csv");

        json windows = json::array();
        if (d.report) {
            std::ostringstream w;
            w.precision(17);
            w << "t_start,t_end,iterations,max_factor\n";
            for (std::size_t i = 0; i < d.report->windows.size(); ++i) {
                const auto& f = d.report->contraction_factors[i];
                const double mf = f.empty() ? 0.0 : *std::max_element(f.begin(), f.end());
                w << d.report->windows[i].first << ',' << d.report->windows[i].second << ','
                  << d.report->iterations[i] << ',' << mf << '\n';
                windows.push_back({d.report->windows[i].first, d.report->windows[i].second});
            }
            write_text(out.directory / "windows.csv", w.str());
            artifacts.emplace_back("windows.csv", out.directory / "windows.csv");
            out.manifest["ledger"] = {{"lipschitz_times_r", d.report->lipschitz_times_r},
                                      {"time_oscillation", d.report->time_oscillation},
                                      {"validity_horizon", d.report->validity_horizon},
                                      {"rejected_windows", d.report->rejected_windows.size()}};
        }
        out.manifest["windows"] = windows;

        json hashes = json::object();
        std::string combined;
        for (const auto& [name, path] : artifacts) {
            const std::string h = sha256_file(path);
            hashes[name] = h;
            combined += name + ":" + h + "\n";
        }
        out.manifest["artifacts"] = hashes;
        out.manifest["content_hash"] = hash_string(combined);
        const bool all = std::all_of(out.diagnostics.begin(), out.diagnostics.end(), [](const auto& r) { return r.pass; });
        out.exit_code = all ? kExitPass : kExitDiagnosticFailure;
    } catch (const ConfigError& e) {
        out.exit_code = kExitConfigError;
        out.error = e.what();
    } catch (const std::exception& e) {
        out.exit_code = kExitSolverError;
        out.error = "scenario " + cfg.scenario + ": " + e.what();
    }
    out.manifest["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.manifest["diagnostics"] = diagnostics_json(out.diagnostics);
    out.manifest["exit_code"] = out.exit_code;
    out.manifest["pass"] = out.exit_code == kExitPass;
    if (!out.error.empty()) {
        out.manifest["error"] = out.error;
    }
    if (out.exit_code != kExitConfigError) {
        try {
            fs::create_directories(out.directory);
            write_text(out.directory / "manifest.json", out.manifest.dump(2) + "\n");
        } catch (const std::exception& e) {
            out.exit_code = kExitSolverError;
            out.error = e.what();
        }
    }
    return out;
}

RunOutcome run_config_file(const fs::path& path, const std::optional<fs::path>& output_root) {
    try {
        return run_experiment(load_config(path), output_root);
    } catch (const ConfigError& e) {
        RunOutcome out;
        out.exit_code = kExitConfigError;
        out.error = e.what();
        return out;
    }
}

std::vector<std::string> suite_names() {
    return {"acceptance", "invariants", "convergence"};
}

namespace {

struct SuiteMember {
    std::string name;
    std::function<std::vector<DiagnosticResult>(const fs::path&)> task;
};

SuiteMember scenario_member(const std::string& scenario) {
    return {scenario, [scenario](const fs::path& root) {
                const RunOutcome r = run_experiment(library_scenario(scenario), root);
                if (r.exit_code == kExitConfigError || r.exit_code == kExitSolverError) {
                    throw Error(r.error);
                }
                return r.diagnostics;
            }};
}

SuiteMember order_member(const std::string& name, double nominal, std::function<ConvergenceStudy()> study) {
    return {name, [nominal, study](const fs::path&) {
                const ConvergenceStudy s = study();
                DiagnosticResult r;
                r.name = "observed_order";
                r.value = s.observed;
                r.bound = nominal;
                r.relation = "~0.3";
                r.pass = std::abs(s.observed - nominal) <= 0.3;
                return std::vector<DiagnosticResult>{r};
            }};
}

std::vector<SuiteMember> suite_members(const std::string& name) {
    std::vector<SuiteMember> m;
    if (name == "invariants") {
        for (const char* s : {"heat_smoke", "linear_wavy", "linear_anisotropic_2d", "time_ramp_direct", "porous_local",
                              "porous_global", "constant_porous"}) {
            m.push_back(scenario_member(s));
        }
    } else if (name == "acceptance") {
        for (const char* s : {"sign_heat", "bandlimited_heat", "bump_heat_2d", "porous_local", "porous2_local",
                              "mollify_step"}) {
            m.push_back(scenario_member(s));
        }
    } else if (name == "convergence") {
        m.push_back(order_member("space_1d", 2.0, [] { return space_convergence(1, {16, 32, 64}); }));
        m.push_back(order_member("space_2d", 2.0, [] { return space_convergence(2, {16, 32, 64}, 0.1, 400); }));
        m.push_back(order_member("time_theta_1", 1.0, [] { return time_convergence(1.0, {8, 16, 32}); }));
        m.push_back(order_member("time_theta_half", 2.0, [] { return time_convergence(0.5, {8, 16, 32}); }));
    } else {
        std::string known;
        for (const auto& s : suite_names()) {
            known += (known.empty() ? "" : ", ") + s;
        }
        throw ConfigError("suite", "unknown suite '" + name + "' (available: " + known + ")");
    }
    return m;
}

} // namespace

SuiteOutcome run_suite(const std::string& name, int workers, const fs::path& output_root) {
    const std::vector<SuiteMember> members = suite_members(name);
    SuiteOutcome out;
    out.name = name;
    std::vector<std::vector<DiagnosticResult>> results(members.size());
    std::vector<std::string> errors(members.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < members.size(); i = next++) {
            try {
                results[i] = members[i].task(output_root / name);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int n = std::clamp(workers, 1, static_cast<int>(members.size()));
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (auto& r : results[i]) {
            out.pass = out.pass && r.pass;
            out.rows.push_back({members[i].name, std::move(r)});
        }
        if (!errors[i].empty()) {
            out.pass = false;
            out.errors.push_back(members[i].name + ": " + errors[i]);
        }
    }
    return out;
}

void print_suite_table(std::ostream& os, const SuiteOutcome& s) {
    std::size_t w_member = 8;
    std::size_t w_diag = 10;
    for (const auto& r : s.rows) {
        w_member = std::max(w_member, r.member.size());
        w_diag = std::max(w_diag, r.result.name.size());
    }
    os << std::left << std::setw(static_cast<int>(w_member) + 2) << "scenario" << std::setw(static_cast<int>(w_diag) + 2)
       << "diagnostic" << std::setw(14) << "value" << std::setw(6) << "rel" << std::setw(14) << "bound"
       << "result\n";
    for (const auto& r : s.rows) {
        os << std::left << std::setw(static_cast<int>(w_member) + 2) << r.member
           << std::setw(static_cast<int>(w_diag) + 2) << r.result.name << std::setw(14) << std::setprecision(6)
           << r.result.value << std::setw(6) << r.result.relation << std::setw(14) << r.result.bound
           << (r.result.pass ? "pass" : "FAIL") << '\n';
    }
    for (const auto& e : s.errors) {
        os << "error: " << e << '\n';
    }
    os << "suite " << s.name << ": " << (s.pass ? "pass" : "FAIL") << '\n';
}

int workers_from_env(int fallback) {
    if (const char* v = std::getenv("QLP_WORKERS")) {
        try {
            const int n = std::stoi(v);
            if (n > 0) {
                return n;
            }
        } catch (const std::exception&) {
        }
    }
    return fallback;
}

std::optional<fs::path> output_root_from_env() {
    if (const char* v = std::getenv("QLP_OUTPUT_DIR"); v != nullptr && *v != '\0') {
        return fs::path(v);
    }
    return std::nullopt;
}

json load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open manifest");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), e.what());
    }
}

void print_manifest(std::ostream& os, const json& m) {
    os << "scenario     " << m.value("scenario", "?") << '\n';
    os << "result       " << (m.value("pass", false) ? "pass" : "FAIL") << " (exit " << m.value("exit_code", -1)
       << ")\n";
    if (m.contains("error")) {
        os << "error        " << m["error"].get<std::string>() << '\n';
    }
    os << "wall time    " << m.value("wall_time_s", 0.0) << " s\n";
    os << "config hash  " << m.value("config_hash", "") << '\n';
    os << "content hash " << m.value("content_hash", "") << '\n';
    if (m.contains("windows")) {
        os << "windows      " << m["windows"].size() << '\n';
    }
    if (m.contains("artifacts")) {
        for (const auto& [k, v] : m["artifacts"].items()) {
            os << "  " << std::left << std::setw(16) << k << v.get<std::string>() << '\n';
        }
    }
    if (m.contains("diagnostics")) {
        for (const auto& d : m["diagnostics"]) {
            os << "  " << std::left << std::setw(16) << d.value("name", "") << std::setw(24) << d["value"].dump()
               << std::setw(6) << d.value("relation", "<=") << std::setw(24) << d["bound"].dump()
               << (d.value("pass", false) ? "pass" : "FAIL") << '\n';
        }
    }
}

ManifestDiff diff_manifests(const json& a, const json& b, double rtol, double atol) {
    ManifestDiff out;
    auto index = [](const json& m) {
        std::map<std::string, json> by_name;
        if (m.contains("diagnostics")) {
            for (const auto& d : m["diagnostics"]) {
                by_name[d.value("name", "")] = d;
            }
        }
        return by_name;
    };
    const auto da = index(a);
    const auto db = index(b);
    for (const auto& [name, ea] : da) {
        const auto it = db.find(name);
        if (it == db.end()) {
            out.lines.push_back(name + ": only in first manifest");
            out.within_tolerance = false;
            continue;
        }
        const json& va = ea["value"];
        const json& vb = it->second["value"];
        std::ostringstream line;
        line.precision(10);
        if (va.is_number() && vb.is_number()) {
            const double x = va.get<double>();
            const double y = vb.get<double>();
            const bool ok = std::abs(x - y) <= atol + rtol * std::abs(y);
            line << name << ": " << x << " vs " << y << " (diff " << std::abs(x - y) << ") " << (ok ? "ok" : "DIFFERS");
            out.within_tolerance = out.within_tolerance && ok;
        } else {
            const bool ok = va == vb;
            line << name << ": " << va.dump() << " vs " << vb.dump() << ' ' << (ok ? "ok" : "DIFFERS");
            out.within_tolerance = out.within_tolerance && ok;
        }
        out.lines.push_back(line.str());
    }
    for (const auto& [name, eb] : db) {
        if (!da.contains(name)) {
            out.lines.push_back(name + ": only in second manifest");
            out.within_tolerance = false;
        }
    }
    if (a.value("content_hash", "") != b.value("content_hash", "")) {
        out.lines.push_back("content hashes differ");
    }
    return out;
}

} // namespace qlp
