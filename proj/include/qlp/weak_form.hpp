#pragma once

#include "qlp/field.hpp"
#include "qlp/linear_pde.hpp"

#include <array>
#include <functional>
#include <vector>

namespace qlp {

/// Smooth space-time test function phi(t, x) = b(t) h(x) with a torus harmonic h.
struct TestFunction {
    std::function<double(double, Point)> value;
    std::function<double(double, Point)> time_derivative;
    std::function<std::array<double, 2>(double, Point)> gradient;
    double c2_norm = 1.0;  ///< sup of phi and its derivatives up to order 2
};

/// b(t) = exp(-1 / (1 - s^2)) on (t_lo, t_hi) with s the affine map to (-1, 1),
/// times cos / sin of the m-th harmonic.
TestFunction bump_harmonic(const Grid& grid, double t_lo, double t_hi, int m, bool sine);
/// Time-independent harmonic (b = 1).
TestFunction static_harmonic(const Grid& grid, int m, bool sine);
/// count functions alternating cos / sin with m = 1, 1, 2, 2, ...
std::vector<TestFunction> default_test_functions(const Grid& grid, double t_lo, double t_hi, int count = 12);

struct WeakResidual {
    double max_residual = 0.0;
    double max_normalised = 0.0;  ///< max residual / ||phi||_{C^2}
};

/// max over phi of |sum_steps dt * sum_cells [u (-d_t phi) + flux . grad phi] dx^n|
/// with midpoint quadrature in time and space (u at nodes, flux at faces).
WeakResidual weak_residual(const SpaceTimeField& u, const SpaceTimeField& flux, const std::vector<TestFunction>& tests);
WeakResidual weak_residual(const LinearSolution& sol, const std::vector<TestFunction>& tests);

/// |<u(0), phi(0)> - <u(T'), phi(T')> - int_0^T' int u(-d_t phi) + flux . grad phi|.
/// T' must be a frame time.
double integral_identity_check(const SpaceTimeField& u, const SpaceTimeField& flux, const TestFunction& phi,
                               double t_prime);

} // namespace qlp
