#include <doctest.h>

#include "qlp/coefficient.hpp"
#include "qlp/errors.hpp"
#include "qlp/field.hpp"
#include "qlp/grid.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace qlp;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("grid spacing and periodic indexing") {
    const Grid g1(1, 256, 3.0);
    CHECK(g1.spacing() * g1.cells_per_axis() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(g1.index(-1) == 255);
    CHECK(g1.index(256) == 0);
    CHECK(g1.neighbor(0, 0, -1) == 255);

    const Grid g2(2, 8, 1.0);
    CHECK(g2.size() == 64);
    CHECK(g2.index(9, -1) == 1 + 8 * 7);
    const auto c = g2.coords(g2.index(3, 5));
    CHECK(c[0] == 3);
    CHECK(c[1] == 5);
    CHECK(g2.distance({0.05, 0.0}, {0.95, 0.0}) == doctest::Approx(0.1));
}

TEST_CASE("essential range of sampled fields") {
    const Grid g(1, 256, 1.0);
    const auto three = ScalarField::constant(g, 3.0);
    CHECK(essential_range(three) == Interval{3.0, 3.0});

    const auto s = ScalarField::from_function(g, [](Point p) { return std::sin(kTwoPi * p.x); });
    const Interval r = essential_range(s);
    CHECK(std::abs(r.lo + 1.0) <= 1e-3);
    CHECK(std::abs(r.hi - 1.0) <= 1e-3);

    const auto step = ScalarField::from_function(g, [](Point p) { return p.x < 0.5 ? 0.0 : 1.0; });
    CHECK(essential_range(step) == Interval{0.0, 1.0});

    SpaceTimeField empty(g, 0);
    CHECK_THROWS_AS(essential_range(empty), Error);
}

TEST_CASE("space-time field rejects non-increasing times") {
    const Grid g(1, 4, 1.0);
    SpaceTimeField f(g, 0);
    f.push_frame(0.0, {1, 2, 3, 4});
    CHECK_THROWS(f.push_frame(0.0, {1, 2, 3, 4}));
    CHECK_THROWS(f.push_frame(1.0, {1, 2, 3}));
    f.push_frame(1.0, {3, 4, 5, 6});
    const auto mid = f.sample_at(0.5);
    CHECK(mid[0] == doctest::Approx(2.0));
    CHECK(f.sample_at(5.0)[3] == doctest::Approx(6.0));
}

TEST_CASE("ellipticity estimates") {
    const Grid g(1, 32, 1.0);
    const SampleCounts counts{9, 8, 65, 32};
    CHECK(verify_ellipticity(make_coefficient("identity", 1), {-3.0, 3.0}, 1.0, g, counts) == 1.0);
    CHECK(verify_ellipticity(make_coefficient("porous:1", 1), {0.5, 2.0}, 1.0, g, counts) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(verify_ellipticity(make_coefficient("porous:2", 1), {0.5, 2.0}, 1.0, g, counts) ==
          doctest::Approx(0.25).epsilon(1e-14));
    CHECK(verify_ellipticity(make_coefficient("scaled:2.5", 1), {0.0, 1.0}, 1.0, g, counts) == 2.5);

    const Grid g2(2, 16, 1.0);
    // rotated diag(1, 2) has eigenvalues 1 and 2 whatever the angle
    const double lam = verify_ellipticity(make_coefficient("anisotropic:0.3", 2), {-1.0, 1.0}, 1.0, g2, counts);
    CHECK(lam == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(lam >= 1.0 - 1e-12);

    const CoefficientFn bad("neg", 1, {}, [](double, Point, double y) { return Matrix2::scalar(y); }, {});
    try {
        verify_ellipticity(bad, {-1.0, 1.0}, 1.0, g, counts);
        FAIL("expected NotElliptic");
    } catch (const NotElliptic& e) {
        CHECK(e.y <= 0.0);
    }
}

TEST_CASE("Lipschitz and equilibrium estimates") {
    const Grid g(1, 16, 1.0);
    const SampleCounts counts{5, 4, 65, 32};
    CHECK(verify_lipschitz_and_equilibrium(make_coefficient("identity", 1), {-1, 1}, 1.0, g, counts).lipschitz == 0.0);

    const auto m1 = verify_lipschitz_and_equilibrium(make_coefficient("porous:1", 1), {0.0, 1.0}, 1.0, g, counts);
    CHECK(m1.lipschitz == doctest::Approx(1.0).epsilon(1e-12));

    // |y^2 - y'^2| / |y - y'| = y + y', largest for the two top samples
    const auto m2 = verify_lipschitz_and_equilibrium(make_coefficient("porous:2", 1), {0.0, 1.0}, 1.0, g, counts);
    CHECK(m2.lipschitz == doctest::Approx(2.0 - 1.0 / 64.0).epsilon(1e-12));
    CHECK(m2.equilibrium == 0.0);
    CHECK(m2.anchored_at_zero);
}

TEST_CASE("assumption report has a non-decreasing modulus") {
    const Grid g(1, 16, 1.0);
    const auto r = assess_assumptions(make_coefficient("time_ramp:0.5", 1), {0.0, 1.0}, 1.0, g, {9, 8, 17, 8});
    CHECK(r.lambda == doctest::Approx(1.0));
    REQUIRE_FALSE(r.modulus.empty());
    for (std::size_t i = 1; i < r.modulus.size(); ++i) {
        CHECK(r.modulus[i].first > r.modulus[i - 1].first);
        CHECK(r.modulus[i].second >= r.modulus[i - 1].second);
    }
}

TEST_CASE("coefficient composition") {
    const Grid g(1, 64, 1.0);
    SpaceTimeField v(g, 0);
    for (int k = 0; k < 3; ++k) {
        v.push_scalar(0.1 * k, ScalarField::from_function(g, [&](Point p) {
                          return 1.0 + 0.5 * std::sin(kTwoPi * p.x) * (1.0 + 0.1 * k);
                      }));
    }
    const auto a = make_coefficient("porous:2", 1);
    const auto series = compose_coefficient(a, v);
    REQUIRE(series.frames.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            const double y = v.frame(k)[c];
            CHECK(series.frames[k].values[c].xx == y * y);
            CHECK(series.frames[k].values[c] == a(v.time(k), g.node(c), y));
        }
    }

    const auto id = compose_coefficient(make_coefficient("identity", 1), 0.0, v.scalar(0));
    CHECK(id.min_ellipticity() == 1.0);
    CHECK(id.sup_frobenius() == 1.0);

    const auto two = compose_coefficient(make_coefficient("porous:1", 1), 0.0, ScalarField::constant(g, 2.0));
    CHECK(two.values[5] == Matrix2::scalar(2.0));

    const auto report = assess_assumptions(a, {0.5, 1.5}, 0.2, g, {5, 8, 33, 8});
    CHECK(within_composition_bound(series, v.sup_norm(), report));

    SpaceTimeField neg(g, 0);
    neg.push_scalar(0.0, ScalarField::constant(g, -0.5));
    CHECK_THROWS_AS(compose_coefficient(a, neg), RangeEscape);
}

TEST_CASE("safety radius") {
    const Grid g(1, 32, 1.0);
    const auto u = ScalarField::from_function(g, [](Point p) { return p.x < 0.5 ? 1.0 : 2.0; });
    CHECK(safety_radius(u, {0.0, std::numeric_limits<double>::infinity()}) == 0.5);

    const auto v = ScalarField::from_function(g, [](Point p) { return p.x < 0.5 ? -0.5 : 0.5; });
    CHECK(safety_radius(v, {-1.0, 1.0}) == 0.25);
    CHECK(safety_radius(v, {}) == 1.0);
    CHECK(safety_radius(v, {}, 3.0) == 3.0);
    CHECK(safety_radius(v, {-2.0, 1.0}) >= safety_radius(v, {-1.0, 1.0}));
    CHECK_THROWS_AS(safety_radius(v, {-0.5, 1.0}), Error);
}

TEST_CASE("shift commutes with coefficient composition") {
    const Grid g(1, 64, 1.0);
    const auto u = ScalarField::from_function(g, [](Point p) { return 1.0 + 0.3 * std::cos(kTwoPi * p.x); });
    const auto a = make_coefficient("porous:1", 1);
    const auto shifted_then = compose_coefficient(a, 0.0, u.shifted(0, 5));
    const auto then_shift = compose_coefficient(a, 0.0, u);
    for (std::size_t c = 0; c < g.size(); ++c) {
        CHECK(shifted_then.values[c] == then_shift.values[g.neighbor(c, 0, -5)]);
    }
}

TEST_CASE("coefficient labels") {
    CHECK_THROWS_AS(make_coefficient("porous", 1), Error);
    CHECK_THROWS_AS(make_coefficient("porous:x", 1), Error);
    CHECK_THROWS_AS(make_coefficient("nope:1", 1), Error);
    const auto a = make_coefficient("porous:1", 1);
    CHECK_THROWS_AS(a(0.0, {}, -1.0), RangeEscape);
    const auto ramp = make_coefficient("time_ramp:0.5", 1);
    CHECK(ramp(0.2, {}, 0.0).xx == doctest::Approx(1.2));
    CHECK(ramp(3.0, {}, 0.0).xx == doctest::Approx(1.5));
    CHECK(ramp.shifted(0.1)(0.2, {}, 0.0).xx == doctest::Approx(1.3));
    const auto w = make_coefficient("wavy:2", 1, 2.0);
    CHECK(w(0.0, {0.5, 0.0}, 0.0).xx == doctest::Approx(2.0 + std::cos(kTwoPi * 0.25)));
    CHECK_FALSE(builtin_coefficient_labels().empty());
}
