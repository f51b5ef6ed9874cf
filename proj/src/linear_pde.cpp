#include "qlp/linear_pde.hpp"

#include "qlp/errors.hpp"
#include "qlp/heat.hpp"
#include "qlp/norms.hpp"
#include "qlp/stencil.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace qlp {

LinearProblem LinearProblem::autonomous(MatrixField a0, ScalarField u0, std::vector<double> times, double theta) {
    LinearProblem p;
    p.u0 = std::move(u0);
    p.times = std::move(times);
    p.coefficient = [a = std::move(a0)](std::size_t) { return a; };
    p.time_constant_coefficient = true;
    p.theta = theta;
    return p;
}

LinearProblem LinearProblem::from_series(MatrixSeries a, ScalarField u0, double theta) {
    LinearProblem p;
    p.u0 = std::move(u0);
    p.times = a.times;
    auto shared = std::make_shared<MatrixSeries>(std::move(a));
    p.coefficient = [shared](std::size_t k) { return shared->frames.at(k); };
    p.theta = theta;
    return p;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

Eigen::Map<const Vec> as_vec(std::span<const double> v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

std::vector<double> to_std(const Vec& v) {
    return {v.data(), v.data() + v.size()};
}

double checked_ellipticity(const MatrixField& a, double t) {
    const double lam = a.min_ellipticity();
    if (!(lam > 0.0)) {
        std::ostringstream os;
        os << "coefficient lost ellipticity at t=" << t << " (min eigenvalue " << lam << ")";
        throw SolverError(os.str());
    }
    return lam;
}

// One linear system M x = b per step; factorisations are reused while M is unchanged.
class StepSolver {
public:
    StepSolver(const Grid& grid, const LinearSolveOptions& opts) : grid_(grid), opts_(opts) {}

    void set_matrix(SpMat m, bool symmetric) {
        m.makeCompressed();
        matrix_ = std::move(m);
        symmetric_ = symmetric;
        if (grid_.dim() == 1) {
            lu_ = std::make_unique<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
            lu_->compute(matrix_);
            if (lu_->info() != Eigen::Success) {
                throw SolverError("sparse LU factorisation failed");
            }
        } else if (symmetric_) {
            cg_ = std::make_unique<Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>>();
            cg_->setTolerance(opts_.tolerance);
            cg_->setMaxIterations(opts_.max_iterations);
            cg_->compute(matrix_);
        } else {
            bicg_ = std::make_unique<Eigen::BiCGSTAB<SpMat>>();
            bicg_->setTolerance(opts_.tolerance);
            bicg_->setMaxIterations(opts_.max_iterations);
            bicg_->compute(matrix_);
        }
    }

    Vec solve(const Vec& b, const Vec& guess, double& residual) const {
        Vec x;
        if (b.norm() == 0.0) {
            residual = 0.0;
            return Vec::Zero(b.size());
        }
        if (lu_) {
            x = lu_->solve(b);
        } else if (cg_) {
            x = cg_->solveWithGuess(b, guess);
        } else {
            x = bicg_->solveWithGuess(b, guess);
        }
        residual = (matrix_ * x - b).norm() / b.norm();
        if (!(residual <= opts_.residual_guard)) {
            std::ostringstream os;
            os << "linear solve did not converge (relative residual " << residual << ")";
            throw SolverError(os.str());
        }
        return x;
    }

private:
    Grid grid_;
    LinearSolveOptions opts_;
    SpMat matrix_;
    bool symmetric_ = true;
    std::unique_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu_;
    std::unique_ptr<Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>> cg_;
    std::unique_ptr<Eigen::BiCGSTAB<SpMat>> bicg_;
};

} // namespace

LinearSolution solve_linear(const LinearProblem& p, const LinearSolveOptions& opts) {
    const Grid& g = p.u0.grid();
    if (p.times.size() < 2 || p.times.front() != 0.0) {
        throw Error("linear problem needs a time grid starting at 0 with at least one step");
    }
    if (!(p.theta >= 0.5 && p.theta <= 1.0)) {
        throw Error("theta must lie in [1/2, 1]");
    }
    if (!p.coefficient) {
        throw Error("linear problem has no coefficient");
    }
    const double theta = p.theta;
    const auto n = static_cast<Eigen::Index>(g.size());

    LinearSolution sol{SpaceTimeField(g, 0), SpaceTimeField(g, g.dim()), SpaceTimeField(g, g.dim()), {}, 0.0, true};

    MatrixField a_now = p.coefficient(0);
    sol.lambda_min = checked_ellipticity(a_now, 0.0);
    bool diagonal = a_now.diagonal();
    SpMat l_now = assemble_operator(a_now);

    auto source = [&](std::size_t k) { return p.source ? p.source(k) : VectorField::zero(g); };
    VectorField f_now = source(0);

    std::vector<double> u(p.u0.values().begin(), p.u0.values().end());
    auto record = [&](double t, const MatrixField& a, const VectorField& f) {
        sol.u.push_frame(t, u);
        sol.grad_u.push_vector(t, face_gradient(g, u));
        sol.flux.push_vector(t, add(face_flux(a, u), f));
    };
    record(0.0, a_now, f_now);

    SpMat identity(n, n);
    identity.setIdentity();
    StepSolver solver(g, opts);
    double cached_dt = -1.0;

    for (std::size_t k = 0; k + 1 < p.times.size(); ++k) {
        const double t1 = p.times[k + 1];
        const double dt = t1 - p.times[k];
        if (!(dt > 0.0)) {
            throw Error("time grid must be strictly increasing");
        }
        MatrixField a_next = p.time_constant_coefficient ? a_now : p.coefficient(k + 1);
        if (!p.time_constant_coefficient) {
            sol.lambda_min = std::min(sol.lambda_min, checked_ellipticity(a_next, t1));
            diagonal = diagonal && a_next.diagonal();
        }
        const SpMat l_next = p.time_constant_coefficient ? l_now : assemble_operator(a_next);
        const VectorField f_next = source(k + 1);

        Vec rhs = as_vec(u);
        std::vector<double> div_f = divergence(f_next);
        rhs += (theta * dt) * as_vec(div_f);
        if (theta < 1.0) {
            rhs += ((1.0 - theta) * dt) * (l_now * as_vec(u));
            div_f = divergence(f_now);
            rhs += ((1.0 - theta) * dt) * as_vec(div_f);
        }

        if (!p.time_constant_coefficient || dt != cached_dt) {
            solver.set_matrix(identity - (theta * dt) * l_next, a_next.diagonal());
            cached_dt = dt;
        }
        double residual = 0.0;
        const Vec x = solver.solve(rhs, as_vec(u), residual);
        sol.residuals.push_back(residual);
        u = to_std(x);
        record(t1, a_next, f_next);

        a_now = std::move(a_next);
        l_now = l_next;
        f_now = f_next;
    }
    sol.monotone_stencil = diagonal && theta == 1.0;
    return sol;
}

double max_principle_tolerance(bool diagonal, double theta) {
    if (!diagonal) {
        return 1e-2;
    }
    return theta == 1.0 ? 1e-10 : 1e-3;
}

LinearSolution free_evolution(const MatrixField& a0, const ScalarField& u0, std::span<const double> times,
                              double theta) {
    auto p = LinearProblem::autonomous(a0, u0, {times.begin(), times.end()}, theta);
    LinearSolution sol = solve_linear(p);
    const double bound = u0.sup_norm() * (1.0 + max_principle_tolerance(a0.diagonal(), theta));
    const double sup = sol.u.sup_norm();
    if (sup > bound) {
        std::ostringstream os;
        os << "free evolution exceeded the datum bound: " << sup << " > " << bound;
        throw MaxPrincipleViolation(os.str());
    }
    return sol;
}

InhomogeneousSolution inhom_solution(const MatrixField& a0, const LinearProblem::SourceAt& source,
                                     std::span<const double> times, double q, double theta) {
    const Grid& g = a0.grid;
    auto p = LinearProblem::autonomous(a0, ScalarField::constant(g, 0.0), {times.begin(), times.end()}, theta);
    p.source = source;
    InhomogeneousSolution out{solve_linear(p)};

    SpaceTimeField f(g, g.dim());
    for (std::size_t k = 0; k < times.size(); ++k) {
        f.push_vector(times[k], source(k));
    }
    const ZNormOptions opts{q, times.back(), {}};
    out.u_sup = out.solution.u.sup_norm();
    out.grad_z = z_norm(out.solution.grad_u, opts).value;
    out.source_z = z_norm(f, opts).value;
    out.ratio = out.source_z > 0.0 ? (out.u_sup + out.grad_z) / out.source_z : 0.0;
    return out;
}

RepresentationCheck representation_check(const MatrixField& a0, const ScalarField& u0,
                                         std::span<const double> times, double theta) {
    const Grid& g = a0.grid;
    const HeatExtension heat = heat_extend(u0, times);
    MatrixField diff = a0;
    for (auto& m : diff.values) {
        m = m - Matrix2::identity();
    }
    auto frames = std::make_shared<SpaceTimeField>(heat.frames);
    LinearProblem::SourceAt source = [diff, frames](std::size_t k) { return face_flux(diff, frames->frame(k)); };

    RepresentationCheck r{0.0, solve_linear(LinearProblem::autonomous(a0, u0, {times.begin(), times.end()}, theta)),
                          {}};
    auto p = LinearProblem::autonomous(a0, ScalarField::constant(g, 0.0), {times.begin(), times.end()}, theta);
    p.source = source;
    r.correction = solve_linear(p);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto e = r.free.u.frame(k);
        const auto h = heat.frames.frame(k);
        const auto c = r.correction.u.frame(k);
        for (std::size_t i = 0; i < g.size(); ++i) {
            r.defect = std::max(r.defect, std::abs(e[i] - (h[i] + c[i])));
        }
    }
    return r;
}

} // namespace qlp
