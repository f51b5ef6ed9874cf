#include "qlp/manufactured.hpp"

#include "qlp/errors.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace qlp {

ManufacturedCase manufactured_case(const Grid& grid, std::vector<double> times) {
    const double k = 2.0 * std::numbers::pi / grid.box_length();
    ManufacturedCase mc;
    mc.a = MatrixField{grid, std::vector<Matrix2>(grid.size())};
    for (std::size_t c = 0; c < grid.size(); ++c) {
        mc.a.values[c] = Matrix2::scalar(2.0 + std::cos(k * grid.node(c).x));
    }
    mc.exact = [k](double t, Point x) { return 2.0 + std::exp(-t) * std::sin(k * x.x); };
    mc.u0 = ScalarField::from_function(grid, [&](Point x) { return mc.exact(0.0, x); });
    // F = e^{-t} cos(kx) / k - (2 + cos kx) e^{-t} k cos kx on the x0 faces.
    auto shared = std::make_shared<std::vector<double>>(std::move(times));
    mc.source = [grid, k, shared](std::size_t node) {
        const double t = shared->at(node);
        VectorField f = VectorField::zero(grid);
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const double x = grid.face(c, 0).x;
            const double e = std::exp(-t);
            f.comp[0][c] = e * std::cos(k * x) / k - (2.0 + std::cos(k * x)) * e * k * std::cos(k * x);
        }
        return f;
    };
    return mc;
}

double manufactured_error(const Grid& grid, int steps, double horizon, double theta) {
    std::vector<double> times(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
        times[i] = horizon * i / steps;
    }
    times.back() = horizon;
    ManufacturedCase mc = manufactured_case(grid, times);
    LinearProblem p = LinearProblem::autonomous(mc.a, mc.u0, times, theta);
    p.source = mc.source;
    const LinearSolution sol = solve_linear(p);
    const auto last = sol.u.frame(sol.u.frame_count() - 1);
    double err = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        err = std::max(err, std::abs(last[c] - mc.exact(horizon, grid.node(c))));
    }
    return err;
}

namespace {

void fit(ConvergenceStudy& s) {
    for (std::size_t i = 1; i < s.errors.size(); ++i) {
        s.orders.push_back(std::log(s.errors[i - 1] / s.errors[i]) / std::log(s.h[i - 1] / s.h[i]));
    }
    const std::size_t n = s.h.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(s.h[i]) / n;
        my += std::log(s.errors[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(s.h[i]) - mx;
        sxy += dx * (std::log(s.errors[i]) - my);
        sxx += dx * dx;
    }
    s.observed = sxy / sxx;
}

} // namespace

ConvergenceStudy space_convergence(int dim, std::vector<int> cells, double horizon, int steps) {
    if (cells.size() < 2) {
        throw Error("convergence study needs at least two levels");
    }
    ConvergenceStudy s;
    for (int n : cells) {
        const Grid g(dim, n, 1.0);
        s.h.push_back(g.spacing());
        s.errors.push_back(manufactured_error(g, steps, horizon, 0.5));
    }
    fit(s);
    return s;
}

ConvergenceStudy time_convergence(double theta, std::vector<int> steps, double horizon, int cells) {
    if (steps.size() < 2) {
        throw Error("convergence study needs at least two levels");
    }
    ConvergenceStudy s;
    const Grid g(1, cells, 1.0);
    for (int m : steps) {
        s.h.push_back(horizon / m);
        s.errors.push_back(manufactured_error(g, m, horizon, theta));
    }
    fit(s);
    return s;
}

} // namespace qlp
