#pragma once

#include "qlp/field.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace qlp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Weighted tent-space norm Z^{inf,q}_{-1/2}(T) over cylinders (t/2, t) x B(x, sqrt t).
struct ZNormOptions {
    double q = 2.0;         ///< in (1, inf]; kInfinity selects the L^inf_{-1/2} norm
    double horizon = 1.0;   ///< T
    std::vector<double> t_samples;  ///< empty: every frame time in (0, T]
};

struct ZNormResult {
    double value = 0.0;
    double argmax_t = 0.0;
    std::size_t argmax_cell = 0;
    std::size_t evaluated = 0;  ///< t samples with enough time resolution
    std::size_t skipped = 0;    ///< t samples with < 2 frames in (t/2, t]
    bool saturated = false;     ///< some ball covered the whole torus
};

/// Discrete Z-norm: sup over grid centres and t samples of the q-average of
/// sqrt(s)|f| over the cylinder. Time integration is trapezoidal with linear
/// interpolation at t/2; the ball is the periodic ball at grid resolution.
/// Throws if no t sample has enough time resolution.
ZNormResult z_norm(const SpaceTimeField& f, const ZNormOptions& opts);

/// Average of g over the periodic ball B(x, r) for every grid centre x.
std::vector<double> ball_average(const Grid& grid, std::span<const double> g, double radius, bool* saturated = nullptr);

/// Z-norm of an analytic |f|(s, y) on R^n by midpoint quadrature.
struct AnalyticZNorm {
    double value = 0.0;
    double richardson_gap = 0.0;  ///< |value(h) - value(2h)|
};
using AnalyticMagnitude = std::function<double(double s, Point y)>;
AnalyticZNorm z_norm_analytic(const AnalyticMagnitude& f, int dim, double q, double horizon,
                              std::span<const Point> centres, int t_samples = 24, int nodes = 32);

/// sup over frames in (0, T] of t^{-beta} |f| (t = 0 frames included when beta <= 0).
double weighted_sup_norm(const SpaceTimeField& f, double beta, double horizon);

/// Witness that Z is not inside L^2(0,T; L^2_loc): f = s^{-1/2} 1_B.
struct NonInclusionWitness {
    std::vector<std::pair<double, double>> z_values;   ///< (q, z-norm)
    std::vector<double> epsilons;
    std::vector<double> integrals;     ///< int_eps^T int_B f^2
    double fitted_slope = 0.0;         ///< d integral / d log(1/eps)
    double ball_measure = 0.0;         ///< |B|
    bool slope_ok = false;             ///< within 5% of |B|
    bool z_ok = false;                 ///< every z value = 1 within 1e-6
};
NonInclusionWitness z_l2_noninclusion_witness(double horizon, int dim = 1);

struct CarlesonReport {
    double value = 0.0;
    double argmax_t = 0.0;
    std::size_t argmax_cell = 0;
    double bound_ratio = 0.0;  ///< value / ||u||_inf
    bool saturated = false;
};

/// sup_{x,t} (int_0^t avg_{B(x, sqrt t)} |grad u|^2)^{1/2} with right-endpoint
/// time quadrature of the gradient frames.
CarlesonReport carleson(const SpaceTimeField& gradient, double u_norm, int max_t_samples = 64);

/// 1/p* = 1/p - 1/(n+2), defined for 1 < p < n+2.
double upper_parabolic_conjugate(double p, int n);
/// 1/q_* = 1/q + 1/(n+2), defined for q > 1.
double lower_parabolic_conjugate(double q, int n);

} // namespace qlp
