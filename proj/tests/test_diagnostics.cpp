#include <doctest.h>

#include "qlp/diagnostics.hpp"
#include "qlp/errors.hpp"
#include "qlp/heat.hpp"
#include "qlp/linear_pde.hpp"
#include "qlp/time_grid.hpp"

#include <cmath>
#include <numbers>

using namespace qlp;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField cosine(const Grid& g) {
    return ScalarField::from_function(g, [&](Point p) { return std::cos(2.0 * kPi * p.x / g.box_length()); });
}

std::vector<double> positive_geometric(double T, double sigma, int steps) {
    auto ts = geometric_times(T, sigma, steps);
    ts.erase(ts.begin());
    return ts;
}

} // namespace

TEST_CASE("range of constants and of the heat flow") {
    const Grid g(1, 64, 1.0);
    const auto c = heat_extend(ScalarField::constant(g, 2.0), uniform_times(0.1, 5));
    const auto rc = range_invariance(c.frames, ScalarField::constant(g, 2.0));
    CHECK(rc.contained);
    CHECK(rc.equal);
    CHECK(rc.excess == 0.0);
    CHECK(rc.inner_gap == 0.0);

    const auto u0 = cosine(g);
    double prev_gap = 1e300;
    for (int steps : {10, 40, 160}) {
        const auto h = heat_extend(u0, geometric_times(0.05, std::pow(1e-6, 1.0 / steps), steps));
        const auto r = range_invariance(h.frames, u0);
        CHECK(r.contained);
        CHECK(r.evolved.hi <= 1.0 + 1e-12);
        CHECK(r.evolved.lo >= -1.0 - 1e-12);
        CHECK(r.inner_gap <= prev_gap);
        prev_gap = r.inner_gap;
    }
    CHECK(prev_gap <= 1e-4);
}

TEST_CASE("range containment flags an overshoot") {
    const Grid g(1, 8, 1.0);
    const auto u0 = ScalarField::constant(g, 1.0);
    SpaceTimeField u(g, 0);
    u.push_scalar(0.0, u0);
    u.push_frame(0.1, {1, 1, 1, 1.001, 1, 1, 1, 1});
    const auto r = range_invariance(u, u0);
    CHECK_FALSE(r.contained);
    CHECK(r.excess == doctest::Approx(0.001));
}

TEST_CASE("discrete Lipschitz constant") {
    const Grid g(1, 100, 1.0);
    const auto ramp = ScalarField::from_function(g, [](Point p) { return std::abs(p.x - 0.5); });
    CHECK(discrete_lipschitz(ramp) == doctest::Approx(1.0));
}

TEST_CASE("modulus of continuity") {
    const Grid g(1, 128, 1.0);
    const std::vector<double> scales{4.0 / 128, 8.0 / 128, 16.0 / 128, 0.25};
    const auto c = heat_extend(ScalarField::constant(g, 1.0), uniform_times(0.01, 10));
    for (const auto& [rho, w] : modulus_of_continuity(c.frames, scales)) {
        CHECK(w == 0.0);
    }

    const auto u0 = cosine(g);
    const double lip = 2.0 * kPi;
    const auto h = heat_extend(u0, uniform_times(0.01, 40));
    const auto m = modulus_of_continuity(h.frames, scales);
    REQUIRE(m.size() == scales.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        // a ball of radius rho holds points 2 rho apart
        CHECK(m[i].second <= 2.0 * lip * m[i].first * 1.2);
        if (i > 0) {
            CHECK(m[i].second >= m[i - 1].second);
        }
    }

    // later windows see a smoother field
    const auto early = modulus_of_continuity(h.frames, scales, {0.0, 0.002, 16});
    const auto late = modulus_of_continuity(h.frames, scales, {0.008, 0.01, 16});
    CHECK(late[1].second < early[1].second);
}

TEST_CASE("long-time decay of a Gaussian bump") {
    const double L = 2.0;
    const Grid g(1, 512, L);
    const double w = 0.02;
    const double c = 1.0;
    auto u0 = ScalarField::from_function(g, [&](Point p) {
        const double x = p.x - 0.5 * L;
        return c + 0.1 * std::exp(-x * x / (w * w));
    });
    const double validity = (L / 8.0) * (L / 8.0);
    const auto h = heat_extend(u0, positive_geometric(2.0 * validity, 0.95, 200));
    const auto r = long_time_decay(h.frames, c, 10.0 * w * w, 10.0, validity);
    CHECK(r.fitted_exponent == doctest::Approx(-0.5).epsilon(0.2));
    CHECK(std::abs(r.fitted_exponent + 0.5) <= 0.1);
    CHECK(r.monotone_tail);
    CHECK(r.fit_points >= 5);
    CHECK_FALSE(r.caveat.empty());

    const auto flat = heat_extend(ScalarField::constant(g, c), positive_geometric(1.0, 0.9, 40));
    const auto z = long_time_decay(flat.frames, c, 0.01, 1.0, validity);
    for (double d : z.sup_dist) {
        CHECK(d == 0.0);
    }
    CHECK_THROWS_AS(long_time_decay(h.frames, c, 0.5 * validity, 10.0, 0.51 * validity), Error);
}

TEST_CASE("Gaussian envelope of the exact heat kernel") {
    for (int dim : {1, 2}) {
        const Grid g(dim, dim == 1 ? 256 : 128, 1.0);
        const std::size_t pole = g.index(g.cells_per_axis() / 2, g.cells_per_axis() / 2);
        const double validity = 1.0 / 64.0;
        const auto h = heat_extend(discrete_delta(g, pole), positive_geometric(validity, 0.9, 20));
        const auto r = gaussian_envelope(h.frames, pole, {-1.0, 1e-3, validity});
        CHECK(r.pass);
        CHECK(r.mass_defect <= 1e-10);
        const double c = std::pow(4.0 * kPi, -0.5 * dim);
        CHECK(r.lower_constant == doctest::Approx(c).epsilon(0.02));
        CHECK(r.upper_constant == doctest::Approx(c).epsilon(0.02));
        CHECK(r.lower_rate == doctest::Approx(0.25).epsilon(0.02));
        CHECK(r.upper_rate == doctest::Approx(0.25).epsilon(0.02));
    }
}

TEST_CASE("Gaussian envelope of a variable coefficient solve") {
    const Grid g(1, 256, 1.0);
    const std::size_t pole = 128;
    MatrixField a{g, std::vector<Matrix2>(g.size())};
    for (std::size_t c = 0; c < g.size(); ++c) {
        a.values[c] = Matrix2::scalar(2.0 + std::cos(2.0 * kPi * g.node(c).x));
    }
    const double validity = (1.0 / 64.0) / 1.0;
    const auto sol = solve_linear(LinearProblem::autonomous(a, discrete_delta(g, pole), geometric_times(validity, 0.95, 150)));
    const auto r = gaussian_envelope(sol.u, pole, {-1.0, 2e-3, validity});
    CHECK(r.pass);
    CHECK(r.positive);
    CHECK(r.mass_defect <= 1e-10);
    CHECK(r.upper_constant / r.lower_constant <= 10.0);
    CHECK(r.lower_rate / r.upper_rate <= 10.0);
}

TEST_CASE("discrete delta has unit mass") {
    const Grid g(2, 16, 2.0);
    const auto d = discrete_delta(g, 17);
    double m = 0.0;
    for (double v : d.values()) {
        m += v * g.cell_volume();
    }
    CHECK(m == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Z-gradient smallness") {
    const Grid g(1, 128, 1.0);
    const auto ts = geometric_times(0.01, 0.93, 200);
    const std::vector<double> t_list{0.01, 0.001, 0.0001};
    const auto flat = heat_extend(ScalarField::constant(g, 1.0), ts, GradientPlacement::Faces);
    const auto z = z_gradient_smallness(flat.gradient, 4.0, t_list);
    for (double v : z.values) {
        CHECK(v == 0.0);
    }

    const auto h = heat_extend(cosine(g), ts, GradientPlacement::Faces);
    const auto s = z_gradient_smallness(h.gradient, 4.0, t_list);
    CHECK(s.monotone);
    CHECK(s.ratio_ok);
    // |grad| ~ 2 pi for small t, so the weighted average scales like sqrt(t)
    CHECK(s.values[2] / s.values[1] == doctest::Approx(std::sqrt(0.1)).epsilon(0.05));
    const std::vector<double> bad{0.001, 0.01};
    CHECK_THROWS_AS(z_gradient_smallness(h.gradient, 4.0, bad), Error);
}
