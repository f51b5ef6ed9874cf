#include <doctest.h>

#include "qlp/errors.hpp"
#include "qlp/heat.hpp"
#include "qlp/linear_pde.hpp"
#include "qlp/manufactured.hpp"
#include "qlp/stencil.hpp"
#include "qlp/time_grid.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace qlp;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField cosine(const Grid& g) {
    const double k = 2.0 * kPi / g.box_length();
    return ScalarField::from_function(g, [k](Point p) { return std::cos(k * p.x); });
}

MatrixField wavy(const Grid& g) {
    MatrixField a{g, std::vector<Matrix2>(g.size())};
    for (std::size_t c = 0; c < g.size(); ++c) {
        a.values[c] = Matrix2::scalar(2.0 + std::cos(2.0 * kPi * g.node(c).x / g.box_length()));
    }
    return a;
}

double final_gap(const SpaceTimeField& u, const std::function<double(Point)>& exact) {
    const std::size_t last = u.frame_count() - 1;
    double e = 0.0;
    for (std::size_t c = 0; c < u.grid().size(); ++c) {
        e = std::max(e, std::abs(u.frame(last)[c] - exact(u.grid().node(c))));
    }
    return e;
}

double heat_error(double theta, int steps) {
    const Grid g(1, 512, 1.0);
    const double T = 0.02;
    const auto sol = solve_linear(
        LinearProblem::autonomous(MatrixField::constant(g, Matrix2::identity()), cosine(g), uniform_times(T, steps), theta));
    // semi-discrete decay of the 3-point Laplacian removes the dx^2 part of the error
    const double dx = g.spacing();
    const double k = 2.0 * kPi;
    const double lam = 4.0 / (dx * dx) * std::sin(0.5 * k * dx) * std::sin(0.5 * k * dx);
    return final_gap(sol.u, [&](Point p) { return std::exp(-lam * T) * std::cos(k * p.x); });
}

} // namespace

TEST_CASE("constant datum stays constant") {
    for (int dim : {1, 2}) {
        const Grid g(dim, 16, 1.0);
        const auto a = dim == 1 ? wavy(g) : MatrixField::constant(g, Matrix2{1.5, 0.3, 0.3, 1.0});
        const auto sol = free_evolution(a, ScalarField::constant(g, 0.7), uniform_times(0.1, 10));
        for (std::size_t k = 0; k < sol.u.frame_count(); ++k) {
            for (double v : sol.u.frame(k)) {
                CHECK(std::abs(v - 0.7) <= 1e-12);
            }
        }
        for (double r : sol.residuals) {
            CHECK(r <= 1e-10);
        }
    }
}

TEST_CASE("heat equation time order for both theta values") {
    const double e1 = heat_error(1.0, 20);
    const double e2 = heat_error(1.0, 40);
    CHECK(std::log2(e1 / e2) == doctest::Approx(1.0).epsilon(0.3));
    const double c1 = heat_error(0.5, 20);
    const double c2 = heat_error(0.5, 40);
    CHECK(std::log2(c1 / c2) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("identity coefficient agrees with the spectral heat flow") {
    const Grid g(2, 32, 1.0);
    const auto u0 = ScalarField::from_function(g, [](Point p) {
        return std::cos(2.0 * kPi * p.x) * std::sin(2.0 * kPi * p.y);
    });
    const auto times = uniform_times(0.01, 200);
    const auto sol = free_evolution(MatrixField::constant(g, Matrix2::identity()), u0, times, 0.5);
    const auto heat = heat_extend(u0, times);
    const std::size_t last = times.size() - 1;
    double gap = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        gap = std::max(gap, std::abs(sol.u.frame(last)[c] - heat.frames.frame(last)[c]));
    }
    // dx^2 k^2 / 12 relative error of the 5-point Laplacian, two directions
    const double dx = g.spacing();
    const double k = 2.0 * kPi;
    const double bound = 2.0 * 0.01 * k * k * (k * dx) * (k * dx) / 12.0;
    CHECK(gap <= 1.5 * bound);
    CHECK(gap >= 1e-6);
}

TEST_CASE("doubled diffusivity doubles the decay rate") {
    const Grid g(1, 256, 1.0);
    const double T = 0.01;
    const auto sol = free_evolution(MatrixField::constant(g, Matrix2::scalar(2.0)), cosine(g), uniform_times(T, 400), 0.5);
    const double k = 2.0 * kPi;
    const double err = final_gap(sol.u, [&](Point p) { return std::exp(-2.0 * k * k * T) * std::cos(k * p.x); });
    CHECK(err <= 1e-4);
}

TEST_CASE("manufactured solution converges at second order in space") {
    const auto s1 = space_convergence(1, {16, 32, 64}, 0.1, 2000);
    CHECK(s1.observed == doctest::Approx(2.0).epsilon(0.15));
    for (double o : s1.orders) {
        CHECK(o == doctest::Approx(2.0).epsilon(0.15));
    }
    const Grid g(1, 64, 1.0);
    const auto times = uniform_times(0.1, 100);
    const auto mc = manufactured_case(g, times);
    // Div(A grad u* + F) = d_t u* with d_t u* = -e^{-t} sin(kx) integrates to
    // F = e^{-t} cos(kx) / k - (2 + cos kx) k e^{-t} cos(kx)
    const double k = 2.0 * kPi;
    const auto f = mc.source(3);
    const double t = times[3];
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double x = g.face(c, 0).x;
        const double expected = std::exp(-t) * std::cos(k * x) / k - (2.0 + std::cos(k * x)) * k * std::exp(-t) * std::cos(k * x);
        CHECK(f.comp[0][c] == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    }
    CHECK(mc.exact(t, {0.25, 0.0}) == doctest::Approx(2.0 + std::exp(-t)));
}

TEST_CASE("manufactured error is independent of theta up to time error") {
    const Grid g(1, 128, 1.0);
    const double be = manufactured_error(g, 400, 0.1, 1.0);
    const double cn = manufactured_error(g, 400, 0.1, 0.5);
    CHECK(cn < be);
    CHECK(cn <= 1e-3);
}

TEST_CASE("theta scheme time orders on the manufactured problem") {
    const auto be = time_convergence(1.0, {20, 40, 80}, 1.0, 256);
    CHECK(be.observed == doctest::Approx(1.0).epsilon(0.3));
    const auto cn = time_convergence(0.5, {10, 20, 40}, 1.0, 2048);
    CHECK(cn.observed == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("mass conservation and discrete maximum principle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int dim : {1, 2}) {
        const Grid g(dim, dim == 1 ? 64 : 16, 1.0);
        std::vector<double> v(g.size());
        for (auto& x : v) {
            x = unif(rng);
        }
        const ScalarField u0(g, v);
        MatrixField a{g, std::vector<Matrix2>(g.size())};
        for (std::size_t c = 0; c < g.size(); ++c) {
            a.values[c] = dim == 1 ? Matrix2::scalar(1.0 + 0.5 * (unif(rng) + 1.0))
                                   : Matrix2{1.0 + 0.5 * (unif(rng) + 1.0), 0.0, 0.0, 1.5};
        }
        const auto sol = free_evolution(a, u0, uniform_times(0.01, 20));
        CHECK(sol.monotone_stencil);
        const Interval r0 = essential_range(u0);
        for (std::size_t k = 0; k < sol.u.frame_count(); ++k) {
            const auto f = sol.u.scalar(k);
            CHECK(f.mean() == doctest::Approx(u0.mean()).epsilon(1e-12).scale(1.0));
            const Interval r = essential_range(f);
            CHECK(r.lo >= r0.lo - 1e-10);
            CHECK(r.hi <= r0.hi + 1e-10);
        }
    }
}

TEST_CASE("non-diagonal stencil is flagged non-monotone") {
    const Grid g(2, 16, 1.0);
    const auto sol = free_evolution(MatrixField::constant(g, Matrix2{1.5, 0.4, 0.4, 1.0}), cosine(g),
                                    uniform_times(0.01, 10));
    CHECK_FALSE(sol.monotone_stencil);
    CHECK(max_principle_tolerance(false, 1.0) == 1e-2);
    CHECK(max_principle_tolerance(true, 0.5) == 1e-3);
    CHECK(max_principle_tolerance(true, 1.0) == 1e-10);
}

TEST_CASE("zero data gives the zero solution") {
    for (int dim : {1, 2}) {
        const Grid g(dim, 16, 1.0);
        for (const auto& a : {MatrixField::constant(g, Matrix2::identity()), MatrixField::constant(g, Matrix2{2.0, 0.5, 0.5, 1.0})}) {
            const auto sol = solve_linear(LinearProblem::autonomous(a, ScalarField::constant(g, 0.0), uniform_times(0.1, 5)));
            CHECK(sol.u.sup_norm() == 0.0);
        }
    }
}

TEST_CASE("inhomogeneous solve: zero source and Duhamel oracle") {
    const Grid g(1, 256, 1.0);
    const auto a0 = MatrixField::constant(g, Matrix2::identity());
    const auto times = uniform_times(0.02, 400);
    const auto zero = inhom_solution(a0, [&](std::size_t) { return VectorField::zero(g); }, times, 4.0);
    CHECK(zero.solution.u.sup_norm() == 0.0);

    // F = grad e^{t Lap} cos = -k e^{-k^2 t} sin(kx); Duhamel gives u = -k^2 t e^{-k^2 t} cos(kx)
    const double k = 2.0 * kPi;
    LinearProblem::SourceAt src = [&](std::size_t n) {
        VectorField f = VectorField::zero(g);
        for (std::size_t c = 0; c < g.size(); ++c) {
            f.comp[0][c] = -k * std::exp(-k * k * times[n]) * std::sin(k * g.face(c, 0).x);
        }
        return f;
    };
    const auto sol = inhom_solution(a0, src, times, 4.0, 0.5);
    const double T = times.back();
    const double err = final_gap(sol.solution.u, [&](Point p) { return -k * k * T * std::exp(-k * k * T) * std::cos(k * p.x); });
    CHECK(err <= 2e-3 * k * k * T);
    CHECK(std::isfinite(sol.ratio));
    CHECK(sol.ratio > 0.0);
}

TEST_CASE("singular-in-time source with finite Z-norm") {
    const Grid g(1, 128, 1.0);
    const auto a0 = MatrixField::constant(g, Matrix2::identity());
    const auto times = geometric_times(0.01, 0.9, 80);
    LinearProblem::SourceAt src = [&](std::size_t n) {
        VectorField f = VectorField::zero(g);
        const double s = std::max(times[n], times[1]);
        for (std::size_t c = 0; c < g.size(); ++c) {
            const double x = g.face(c, 0).x - 0.5;
            f.comp[0][c] = std::exp(-x * x / 0.01) / std::sqrt(s);
        }
        return f;
    };
    const auto sol = inhom_solution(a0, src, times, 4.0);
    CHECK(std::isfinite(sol.ratio));
    CHECK(sol.source_z > 0.0);
    CHECK(sol.source_z <= 1.0 + 1e-9);
}

TEST_CASE("linearity in the source") {
    const Grid g(1, 64, 1.0);
    const auto a = wavy(g);
    const auto times = uniform_times(0.05, 20);
    auto f1 = [&](std::size_t n) {
        VectorField f = VectorField::zero(g);
        for (std::size_t c = 0; c < g.size(); ++c) {
            f.comp[0][c] = std::sin(2.0 * kPi * g.face(c, 0).x) * (1.0 + times[n]);
        }
        return f;
    };
    auto f2 = [&](std::size_t) {
        VectorField f = VectorField::zero(g);
        for (std::size_t c = 0; c < g.size(); ++c) {
            f.comp[0][c] = std::cos(6.0 * kPi * g.face(c, 0).x);
        }
        return f;
    };
    auto run = [&](LinearProblem::SourceAt s) {
        auto p = LinearProblem::autonomous(a, ScalarField::constant(g, 0.0), times);
        p.source = std::move(s);
        return solve_linear(p).u;
    };
    const auto u1 = run(f1);
    const auto u2 = run(f2);
    const auto u12 = run([&](std::size_t n) { return add(f1(n), f2(n)); });
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            CHECK(std::abs(u12.frame(k)[c] - u1.frame(k)[c] - u2.frame(k)[c]) <= 1e-11);
        }
    }
}

TEST_CASE("representation formula defect") {
    const Grid g(1, 64, 1.0);
    const auto u0 = cosine(g);
    const auto id = representation_check(MatrixField::constant(g, Matrix2::identity()), u0, uniform_times(0.02, 20));
    CHECK(id.correction.u.sup_norm() == 0.0);
    // E_Id here is the spectral flow, so the defect is the scheme error of the free solve
    CHECK(id.defect <= 1e-2);

    double prev = 1e300;
    for (int n : {32, 64, 128}) {
        const Grid gn(1, n, 1.0);
        const auto r = representation_check(MatrixField::constant(gn, Matrix2::scalar(2.0)), cosine(gn),
                                            uniform_times(0.02, n), 0.5);
        CHECK(r.defect < prev);
        prev = r.defect;
    }
    CHECK(prev <= 1e-3);
}

TEST_CASE("stencil operator agrees with divergence of the face flux") {
    const Grid g(2, 8, 1.0);
    MatrixField a{g, std::vector<Matrix2>(g.size())};
    std::vector<double> u(g.size());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t c = 0; c < g.size(); ++c) {
        a.values[c] = Matrix2{1.0 + unif(rng), 0.2 * unif(rng), 0.2 * unif(rng), 1.0 + unif(rng)};
        u[c] = unif(rng);
    }
    const auto L = assemble_operator(a);
    const auto div = divergence(face_flux(a, u));
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    const Eigen::VectorXd y = L * x;
    double sum = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        CHECK(y[static_cast<Eigen::Index>(c)] == doctest::Approx(div[c]).epsilon(1e-12).scale(1.0));
        sum += div[c];
    }
    CHECK(std::abs(sum) <= 1e-10);
}

TEST_CASE("time grids") {
    const auto u = uniform_times(1.0, 4);
    CHECK(u == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    const auto geo = geometric_times(1.0, 0.5, 3);
    REQUIRE(geo.size() == 5);
    CHECK(geo[0] == 0.0);
    CHECK(geo[1] == doctest::Approx(0.125));
    CHECK(geo.back() == 1.0);
    const auto gr = graded_times(1.0, 0.1, 0.01, 2.0);
    CHECK(gr.front() == 0.0);
    CHECK(gr.back() == 1.0);
    CHECK(gr[1] == doctest::Approx(0.01));
    for (std::size_t i = 1; i < gr.size(); ++i) {
        CHECK(gr[i] - gr[i - 1] <= 0.1 + 1e-12);
    }
}

TEST_CASE("bad problems are rejected") {
    const Grid g(1, 8, 1.0);
    const auto a = MatrixField::constant(g, Matrix2::identity());
    CHECK_THROWS_AS(solve_linear(LinearProblem::autonomous(a, ScalarField::constant(g, 0), {0.0, 0.1}, 0.3)), Error);
    CHECK_THROWS_AS(solve_linear(LinearProblem::autonomous(a, ScalarField::constant(g, 0), {0.0})), Error);
    const auto neg = MatrixField::constant(g, Matrix2::scalar(-1.0));
    CHECK_THROWS_AS(solve_linear(LinearProblem::autonomous(neg, ScalarField::constant(g, 0), {0.0, 0.1})), Error);
}
