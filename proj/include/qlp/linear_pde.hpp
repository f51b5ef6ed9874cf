#pragma once

#include "qlp/coefficient.hpp"
#include "qlp/field.hpp"

#include <functional>
#include <span>
#include <vector>

namespace qlp {

/// d_t u - Div(A grad u) = Div(F), u(0) = u0 on the torus.
///
/// The coefficient and source are supplied per time node so that iterates of
/// the fixed-point map never have to materialise a full matrix history.
struct LinearProblem {
    using CoefficientAt = std::function<MatrixField(std::size_t node)>;
    using SourceAt = std::function<VectorField(std::size_t node)>;

    ScalarField u0;
    std::vector<double> times;
    CoefficientAt coefficient;
    bool time_constant_coefficient = false;
    SourceAt source;  ///< face-centred F; empty means F = 0
    double theta = 1.0;

    /// Time-constant coefficient A0(x), no source.
    static LinearProblem autonomous(MatrixField a0, ScalarField u0, std::vector<double> times, double theta = 1.0);
    /// Time-dependent coefficient from a composed series.
    static LinearProblem from_series(MatrixSeries a, ScalarField u0, double theta = 1.0);
};

struct LinearSolveOptions {
    double tolerance = 1e-12;       ///< relative tolerance of the iterative solver
    double residual_guard = 1e-10;  ///< accepted ||M x - b|| / ||b|| per step
    int max_iterations = 5000;
};

struct LinearSolution {
    SpaceTimeField u;
    SpaceTimeField grad_u;  ///< normal face differences, rank dim
    SpaceTimeField flux;    ///< A grad u + F on faces, rank dim
    std::vector<double> residuals;
    double lambda_min = 0.0;
    bool monotone_stencil = true;  ///< theta = 1 and diagonal A: discrete maximum principle holds
};

LinearSolution solve_linear(const LinearProblem& p, const LinearSolveOptions& opts = {});

/// E_{A0}(u0): F = 0, A time-constant, with the maximum-principle post-check.
/// Throws MaxPrincipleViolation when ||u||_inf exceeds ||u0||_inf beyond the
/// tolerance of the stencil in use (1e-10 monotone, 1e-3 theta = 1/2,
/// 1e-2 non-diagonal).
LinearSolution free_evolution(const MatrixField& a0, const ScalarField& u0, std::span<const double> times,
                              double theta = 1.0);

/// Tolerance band of the range checks for a given stencil.
double max_principle_tolerance(bool diagonal, double theta);

struct InhomogeneousSolution {
    LinearSolution solution;
    double u_sup = 0.0;
    double grad_z = 0.0;
    double source_z = 0.0;
    double ratio = 0.0;  ///< (||u||_inf + ||grad u||_Z) / ||F||_Z, stand-in for C(T)
};

/// R_{A0}(F): zero initial datum.
InhomogeneousSolution inhom_solution(const MatrixField& a0, const LinearProblem::SourceAt& source,
                                     std::span<const double> times, double q, double theta = 1.0);

struct RepresentationCheck {
    double defect = 0.0;  ///< sup |E_A0 u0 - (E_Id u0 + R_A0((A0 - Id) grad E_Id u0))|
    LinearSolution free;
    LinearSolution correction;
};

RepresentationCheck representation_check(const MatrixField& a0, const ScalarField& u0,
                                         std::span<const double> times, double theta = 1.0);

} // namespace qlp
