#pragma once

#include "qlp/coefficient.hpp"
#include "qlp/field.hpp"
#include "qlp/linear_pde.hpp"

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace qlp {

/// Parameters of the Picard iteration on one window and of its time grid.
struct FixedPointConfig {
    double q = 6.0;            ///< Z-exponent, q > n + 2
    double r = 0.2;            ///< ball radius, 0 < r < safety radius
    double horizon = 0.005;    ///< local window T
    int max_iters = 50;
    double fp_tol = 1e-9;      ///< stop when ||v_{k+1} - v_k||_X <= fp_tol ||u0||_inf
    int contraction_window = 3;
    double theta = 1.0;
    double max_step = 1e-4;    ///< time grid: cap on dt
    double first_step = 1e-6;  ///< time grid: first dt, grown geometrically
    double growth = 1.1;
    int z_samples = 48;        ///< t samples for the Z-norm part of ||.||_X
    bool compare_oracle = true;

    /// Throws ConfigError with a "fixed_point.<field>" path. r_sharp <= 0 skips the radius bound.
    void validate(int dim, double r_sharp = 0.0) const;
    std::vector<double> window_times(double length) const;
};

struct BallMembership {
    double sup_dist = 0.0;  ///< ||v - u0||_inf
    double grad_z = 0.0;    ///< ||grad v||_Z
    bool in_ball = true;
};

/// u with its face gradient and the face flux a(t, x, u) grad u.
struct QuasilinearSolution {
    SpaceTimeField u;
    SpaceTimeField grad_u;
    SpaceTimeField flux;
};

struct SolveReport {
    std::vector<int> iterations;       ///< per window; the accepted iterate index
    std::vector<int> map_evaluations;  ///< per window
    std::vector<std::vector<double>> contraction_factors;
    std::vector<std::vector<BallMembership>> membership;
    std::vector<std::pair<double, double>> windows;
    std::vector<std::pair<double, double>> rejected_windows;
    double range_drift = 0.0;
    double validity_horizon = 0.0;
    double oracle_gap = std::numeric_limits<double>::quiet_NaN();
    double lipschitz_times_r = 0.0;  ///< C_L(K) r
    double time_oscillation = 0.0;   ///< sup |a(t, x, u0) - a(0, x, u0)| over the first window

    double max_contraction_factor() const;
    int total_iterations() const;
};

/// ||w||_inf + ||grad w||_Z with q and horizon taken from the last frame time.
double x_norm(const SpaceTimeField& w, const SpaceTimeField& grad_w, double q, int z_samples = 48);

BallMembership ball_membership(const SpaceTimeField& v, const SpaceTimeField& grad_v, const ScalarField& u0,
                               double r, double q, int z_samples = 48);

/// Theta(v): the linear solve with A0 = a(0, x, u0) and source (a(t, x, v) - A0) grad v on v's time grid.
LinearSolution theta_map(const SpaceTimeField& v, const ScalarField& u0, const CoefficientFn& a, double theta = 1.0);

/// Face flux a(t_k, x, u_k) grad u_k for every frame.
SpaceTimeField quasilinear_flux(const CoefficientFn& a, const SpaceTimeField& u);

/// Semi-implicit stepping with `corrections` frozen-coefficient re-steps.
QuasilinearSolution direct_solve(const ScalarField& u0, const CoefficientFn& a, std::span<const double> times,
                                 double theta = 1.0, int corrections = 2);

/// Picard iteration from the constant-in-time extension of u0 on [0, cfg.horizon].
std::pair<QuasilinearSolution, SolveReport> local_solve_fixed_point(const ScalarField& u0, const CoefficientFn& a,
                                                                    const FixedPointConfig& cfg);

/// Windowed local solves glued at terminal frames.
std::pair<QuasilinearSolution, SolveReport> global_solve(const ScalarField& u0, const CoefficientFn& a, double t_end,
                                                         const FixedPointConfig& cfg);

/// u0 * Phi_eps with the normalised standard bump, weights summing to 1 on the grid.
ScalarField mollify(const ScalarField& u0, double eps);

struct MollifyRun {
    double eps = 0.0;
    ScalarField datum;
    QuasilinearSolution solution;
    SolveReport report;
};

struct MollifyReport {
    std::vector<MollifyRun> runs;
    std::vector<std::vector<double>> distances;  ///< pairwise L^2 on [T/4, T] x torus
    std::vector<double> consecutive;             ///< distances[i][i+1]
    bool cauchy_monotone = true;                 ///< consecutive distances decrease
    double sup_excess = 0.0;                     ///< max(||u_eps||_inf - ||u0||_inf, 0)
    Interval hull;                               ///< hull of every u_eps over t > 0
};

/// Mollifies u0 for each eps (decreasing) and globally solves each, concurrently.
MollifyReport mollify_solve(const ScalarField& u0, const CoefficientFn& a, std::vector<double> eps_list, double t_end,
                            const FixedPointConfig& cfg);

/// L^2 distance over [t_from, t_to] x torus using `samples` uniformly spaced times.
double space_time_l2_distance(const SpaceTimeField& a, const SpaceTimeField& b, double t_from, double t_to,
                              int samples = 33);

} // namespace qlp
