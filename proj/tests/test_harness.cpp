#include <doctest.h>

#include "qlp/config.hpp"
#include "qlp/errors.hpp"
#include "qlp/field_io.hpp"
#include "qlp/runner.hpp"
#include "qlp/scenarios.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using namespace qlp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qlp_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string config_error_path(const json& j) {
    try {
        validate(parse_config(j));
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "";
}

} // namespace

TEST_CASE("config parsing names the offending field") {
    const json base = to_json(library_scenario("heat_smoke"));
    CHECK(config_error_path(base).empty());

    json q = base;
    q["fixed_point"]["q"] = 2.0;
    CHECK(config_error_path(q) == "fixed_point.q");

    json n = base;
    n["grid"]["N"] = 100;
    CHECK(config_error_path(n) == "grid.N");

    json unknown = base;
    unknown["gird"] = 1;
    CHECK(config_error_path(unknown) == "gird");

    json coef = base;
    coef["coefficient"] = "porous:";
    CHECK(config_error_path(coef) == "coefficient");

    json mode = base;
    mode["mode"] = "fast";
    CHECK(config_error_path(mode) == "mode");

    json diag = base;
    diag["diagnostics"] = json::array({"range", "colour"});
    CHECK(config_error_path(diag).rfind("diagnostics", 0) == 0);

    json type = base;
    type["horizon"] = "long";
    CHECK(config_error_path(type) == "horizon");
}

TEST_CASE("config round trip") {
    for (const auto& [name, cfg] : scenario_library()) {
        const json once = to_json(cfg);
        const json twice = to_json(parse_config(once));
        CHECK_MESSAGE(once == twice, name);
    }
    json inf = to_json(library_scenario("porous_local"));
    inf["fixed_point"]["q"] = "inf";
    CHECK(std::isinf(parse_config(inf).fixed_point.q));
}

TEST_CASE("datum presets") {
    const Grid g(1, 64, 1.0);
    const auto step = make_datum(g, {"step", 1.0, 1.0});
    CHECK(essential_range(step) == Interval{1.0, 2.0});
    const auto cosine = make_datum(g, {"cos", 1.0, 0.1});
    CHECK(cosine[0] == doctest::Approx(1.1));
    const auto zero = make_datum(g, {"zero", 0.0, 1.0});
    CHECK(zero.sup_norm() == 0.0);
    const auto a = make_datum(g, {"random_bandlimited:3", 0.0, 1.0});
    const auto b = make_datum(g, {"random_bandlimited:3", 0.0, 1.0});
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK(a.sup_norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(make_datum(g, {"triangle", 0.0, 1.0}), Error);
    CHECK_THROWS_AS(library_scenario("no_such_scenario"), ConfigError);
}

TEST_CASE("binary field round trip") {
    const fs::path dir = scratch("field_io");
    const Grid g(2, 8, 1.5);
    SpaceTimeField f(g, 2);
    for (int k = 0; k < 3; ++k) {
        std::vector<double> v(2 * g.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = std::sin(0.1 * i + k);
        }
        f.push_frame(0.25 * k, v);
    }
    write_field(dir / "f.qlpf", f);
    CHECK(fs::file_size(dir / "f.qlpf") == 64 + 3 * 8 + 3 * 2 * 64 * 8);
    std::ifstream in(dir / "f.qlpf", std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "QLPF");

    const auto back = read_field(dir / "f.qlpf");
    CHECK(back.grid() == g);
    CHECK(back.vector_rank() == 2);
    REQUIRE(back.frame_count() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back.time(k) == f.time(k));
        CHECK(std::equal(back.frame(k).begin(), back.frame(k).end(), f.frame(k).begin()));
    }

    write_field_csv(dir / "f.csv", f, 2);
    std::ifstream csv(dir / "f.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,cell,x,y,v0,v1");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);) {
        ++rows;
    }
    CHECK(rows == 2 * g.size());
    fs::remove_all(dir);
}

TEST_CASE("sha256 test vector") {
    const std::string abc = "abc";
    const auto h = sha256_hex({reinterpret_cast<const unsigned char*>(abc.data()), abc.size()});
    CHECK(h == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("smoke run passes and is reproducible") {
    const fs::path dir = scratch("smoke");
    const auto cfg = library_scenario("heat_smoke");
    const auto first = run_experiment(cfg, dir / "a");
    CHECK(first.exit_code == kExitPass);
    CHECK(fs::exists(first.directory / "manifest.json"));
    const auto second = run_experiment(cfg, dir / "b");
    CHECK(first.manifest["content_hash"] == second.manifest["content_hash"]);
    CHECK(first.manifest["config_hash"] == second.manifest["config_hash"]);

    const auto loaded = load_manifest(first.directory / "manifest.json");
    CHECK(diff_manifests(loaded, second.manifest, 0.0, 0.0).within_tolerance);
    json skewed = second.manifest;
    for (auto& d : skewed["diagnostics"]) {
        d["value"] = d["value"].get<double>() * 2.0 + 1.0;
    }
    CHECK_FALSE(diff_manifests(loaded, skewed, 1e-6, 1e-12).within_tolerance);
    fs::remove_all(dir);
}

TEST_CASE("malformed config gives exit code 2") {
    const fs::path dir = scratch("malformed");
    json j = to_json(library_scenario("porous_local"));
    j["fixed_point"]["q"] = 2.0;
    std::ofstream(dir / "bad.json") << j.dump(2);
    const auto out = run_config_file(dir / "bad.json", dir);
    CHECK(out.exit_code == kExitConfigError);
    CHECK(out.error.find("fixed_point.q") != std::string::npos);

    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(run_config_file(dir / "broken.json", dir).exit_code == kExitConfigError);
    CHECK(run_config_file(dir / "missing.json", dir).exit_code == kExitConfigError);
    fs::remove_all(dir);
}

TEST_CASE("a bound nobody can meet gives exit code 1") {
    const fs::path dir = scratch("failing");
    auto cfg = library_scenario("heat_smoke");
    cfg.diagnostics = {{"weak_residual", 0.0}};
    const auto out = run_experiment(cfg, dir);
    CHECK(out.exit_code == kExitDiagnosticFailure);
    fs::remove_all(dir);
}

TEST_CASE("unknown suite lists the available ones") {
    try {
        run_suite("bogus", 1, scratch("suite"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        for (const auto& s : suite_names()) {
            CHECK(msg.find(s) != std::string::npos);
        }
    }
}

TEST_CASE("environment overrides") {
    setenv("QLP_WORKERS", "3", 1);
    CHECK(workers_from_env(1) == 3);
    setenv("QLP_WORKERS", "zero", 1);
    CHECK(workers_from_env(5) == 5);
    unsetenv("QLP_WORKERS");
    setenv("QLP_OUTPUT_DIR", "/tmp/qlp_env", 1);
    CHECK(output_root_from_env() == fs::path("/tmp/qlp_env"));
    unsetenv("QLP_OUTPUT_DIR");
    CHECK_FALSE(output_root_from_env().has_value());
}
