#include "qlp/weak_form.hpp"

#include "qlp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qlp {

namespace {

struct Harmonic {
    double kx;
    double ky;
    bool sine;

    double value(Point x) const {
        const double a = kx * x.x + ky * x.y;
        return sine ? std::sin(a) : std::cos(a);
    }
    std::array<double, 2> gradient(Point x) const {
        const double a = kx * x.x + ky * x.y;
        const double d = sine ? std::cos(a) : -std::sin(a);
        return {kx * d, ky * d};
    }
    double k2() const { return kx * kx + ky * ky; }
};

Harmonic harmonic(const Grid& grid, int m, bool sine) {
    const double k = 2.0 * std::numbers::pi / grid.box_length();
    return {k * m, grid.dim() == 2 ? k * (m % 2) : 0.0, sine};
}

} // namespace

TestFunction bump_harmonic(const Grid& grid, double t_lo, double t_hi, int m, bool sine) {
    if (!(t_hi > t_lo)) {
        throw Error("bump support must be a non-empty interval");
    }
    const Harmonic h = harmonic(grid, m, sine);
    const double mid = 0.5 * (t_lo + t_hi);
    const double half = 0.5 * (t_hi - t_lo);
    auto bump = [mid, half](double t) {
        const double s = (t - mid) / half;
        return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
    };
    auto bump_dt = [mid, half](double t) {
        const double s = (t - mid) / half;
        if (std::abs(s) >= 1.0) {
            return 0.0;
        }
        const double d = 1.0 - s * s;
        return std::exp(-1.0 / d) * (-2.0 * s / (d * d)) / half;
    };
    TestFunction f;
    f.value = [h, bump](double t, Point x) { return bump(t) * h.value(x); };
    f.time_derivative = [h, bump_dt](double t, Point x) { return bump_dt(t) * h.value(x); };
    f.gradient = [h, bump](double t, Point x) {
        auto g = h.gradient(x);
        const double b = bump(t);
        return std::array<double, 2>{b * g[0], b * g[1]};
    };
    // sup|b| = e^-1; sup|b'| and sup|b''| scale like 1/half and 1/half^2.
    const double k = std::sqrt(h.k2());
    f.c2_norm = std::max({std::exp(-1.0), k * std::exp(-1.0), h.k2() * std::exp(-1.0), 1.0 / half, 1.0 / (half * half)});
    return f;
}

TestFunction static_harmonic(const Grid& grid, int m, bool sine) {
    const Harmonic h = harmonic(grid, m, sine);
    TestFunction f;
    f.value = [h](double, Point x) { return h.value(x); };
    f.time_derivative = [](double, Point) { return 0.0; };
    f.gradient = [h](double, Point x) { return h.gradient(x); };
    f.c2_norm = std::max({1.0, std::sqrt(h.k2()), h.k2()});
    return f;
}

std::vector<TestFunction> default_test_functions(const Grid& grid, double t_lo, double t_hi, int count) {
    std::vector<TestFunction> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(bump_harmonic(grid, t_lo, t_hi, i / 2 + 1, i % 2 == 1));
    }
    return out;
}

namespace {

// int over one time slab [t0, t1] by the midpoint rule, with u and flux
// averaged from the slab ends.
double slab_integral(const SpaceTimeField& u, const SpaceTimeField& flux, std::size_t k, const TestFunction& phi) {
    const Grid& g = u.grid();
    const double t0 = u.time(k);
    const double t1 = u.time(k + 1);
    const double tm = 0.5 * (t0 + t1);
    const auto u0 = u.frame(k);
    const auto u1 = u.frame(k + 1);
    double s = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Point x = g.node(c);
        s += 0.5 * (u0[c] + u1[c]) * (-phi.time_derivative(tm, x));
        for (int a = 0; a < g.dim(); ++a) {
            const double fm = 0.5 * (flux.component(k, a)[c] + flux.component(k + 1, a)[c]);
            s += fm * phi.gradient(tm, g.face(c, a))[a];
        }
    }
    return s * g.cell_volume() * (t1 - t0);
}

void check_pair(const SpaceTimeField& u, const SpaceTimeField& flux) {
    if (!(u.grid() == flux.grid()) || u.frame_count() != flux.frame_count() || flux.vector_rank() != u.grid().dim()) {
        throw Error("solution and flux frames do not match");
    }
}

} // namespace

WeakResidual weak_residual(const SpaceTimeField& u, const SpaceTimeField& flux, const std::vector<TestFunction>& tests) {
    check_pair(u, flux);
    WeakResidual r;
    for (const auto& phi : tests) {
        double total = 0.0;
        for (std::size_t k = 0; k + 1 < u.frame_count(); ++k) {
            total += slab_integral(u, flux, k, phi);
        }
        r.max_residual = std::max(r.max_residual, std::abs(total));
        r.max_normalised = std::max(r.max_normalised, std::abs(total) / phi.c2_norm);
    }
    return r;
}

WeakResidual weak_residual(const LinearSolution& sol, const std::vector<TestFunction>& tests) {
    return weak_residual(sol.u, sol.flux, tests);
}

double integral_identity_check(const SpaceTimeField& u, const SpaceTimeField& flux, const TestFunction& phi,
                               double t_prime) {
    check_pair(u, flux);
    const auto times = u.times();
    const auto it = std::find(times.begin(), times.end(), t_prime);
    if (it == times.end()) {
        throw Error("T' must be one of the frame times");
    }
    const std::size_t last = static_cast<std::size_t>(it - times.begin());
    const Grid& g = u.grid();
    auto pairing = [&](std::size_t k) {
        double s = 0.0;
        const auto f = u.frame(k);
        for (std::size_t c = 0; c < g.size(); ++c) {
            s += f[c] * phi.value(u.time(k), g.node(c));
        }
        return s * g.cell_volume();
    };
    double bulk = 0.0;
    for (std::size_t k = 0; k < last; ++k) {
        bulk += slab_integral(u, flux, k, phi);
    }
    return std::abs(pairing(0) - pairing(last) - bulk);
}

} // namespace qlp
