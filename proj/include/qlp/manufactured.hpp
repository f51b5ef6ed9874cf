#pragma once

#include "qlp/linear_pde.hpp"

#include <functional>
#include <vector>

namespace qlp {

/// u*(t, x) = 2 + e^{-t} sin(k x0) with A(x) = (2 + cos(k x0)) Id, k = 2 pi / L,
/// and the face source F that makes u* an exact solution.
struct ManufacturedCase {
    MatrixField a;
    LinearProblem::SourceAt source;
    ScalarField u0;
    std::function<double(double, Point)> exact;
};

ManufacturedCase manufactured_case(const Grid& grid, std::vector<double> times);

/// Sup error at the final time.
double manufactured_error(const Grid& grid, int steps, double horizon, double theta);

struct ConvergenceStudy {
    std::vector<double> h;       ///< dx or dt per level
    std::vector<double> errors;
    std::vector<double> orders;  ///< log2 ratios of successive levels
    double observed = 0.0;       ///< least-squares slope of log error against log h
};

/// Error under dx refinement at fixed fine dt (Crank-Nicolson).
ConvergenceStudy space_convergence(int dim, std::vector<int> cells, double horizon = 0.1, int steps = 4000);
/// Error under dt refinement at fixed fine dx.
ConvergenceStudy time_convergence(double theta, std::vector<int> steps, double horizon = 1.0, int cells = 1024);

} // namespace qlp
