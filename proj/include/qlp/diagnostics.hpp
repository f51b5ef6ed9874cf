#pragma once

#include "qlp/field.hpp"
#include "qlp/norms.hpp"

#include <span>
#include <string>
#include <vector>

namespace qlp {

struct RangeReport {
    Interval initial;        ///< hull of u0
    Interval evolved;        ///< hull of u over frames with t > 0
    double excess = 0.0;     ///< how far the evolved hull leaves the initial hull
    double inner_gap = 0.0;  ///< how far the evolved hull falls short of the initial hull
    double containment_tolerance = 0.0;
    double equality_slack = 0.0;
    bool contained = true;
    bool equal = true;
};

/// Convex-hull comparison of u against u0. Containment uses
/// containment_rel * ||u0||_inf; equality uses the given slack, or
/// 2 dx Lip(u0) when slack < 0.
RangeReport range_invariance(const SpaceTimeField& u, const ScalarField& u0, double containment_rel = 1e-8,
                             double equality_slack = -1.0);

/// Discrete Lipschitz constant max |u(c + e_a) - u(c)| / dx.
double discrete_lipschitz(const ScalarField& u);

struct ModulusOptions {
    double t_from = 0.0;             ///< base times restricted to [t_from, t_to]
    double t_to = kInfinity;
    std::size_t max_base_times = 32;
};

/// (rho, omega(rho)) with omega the largest oscillation of u over parabolic
/// cylinders (t - rho^2, t] x B(x, rho); made non-decreasing in rho.
std::vector<std::pair<double, double>> modulus_of_continuity(const SpaceTimeField& u, std::span<const double> scales,
                                                             const ModulusOptions& opts = {});

struct DecayReport {
    double c = 0.0;
    std::vector<double> times;
    std::vector<double> sup_dist;  ///< ||u(t) - c||_inf
    double fit_from = 0.0;
    double fit_to = 0.0;
    std::size_t fit_points = 0;
    double fitted_exponent = 0.0;  ///< slope of log sup_dist against log t
    bool monotone_tail = true;
    std::string caveat;
};

/// Fits the decay exponent on frames with t in [fit_from, min(fit_to, validity)].
/// Throws when fewer than 5 frames fall in the window.
DecayReport long_time_decay(const SpaceTimeField& u, double c, double fit_from, double fit_to, double validity);

struct EnvelopeReport {
    double lower_constant = 0.0;   ///< C0
    double lower_rate = 0.0;       ///< c0
    double upper_constant = 0.0;   ///< C1
    double upper_rate = 0.0;       ///< c1
    double mass_defect = 0.0;      ///< max_t |sum Gamma dx^n - 1|
    double min_value = 0.0;        ///< smallest Gamma on the probe region
    std::size_t samples = 0;
    bool positive = true;
    bool pass = false;
    std::string failure;
};

struct EnvelopeOptions {
    double probe_radius = -1.0;  ///< default L/4
    double t_from = 0.0;         ///< probe frames with t in [t_from, t_to]
    double t_to = kInfinity;
    int bins = 48;
    double lower_quantile = 0.05;
    double upper_quantile = 0.95;
};

/// Two-sided Gaussian envelope fit of Gamma(t, x; 0, y0) given the solution
/// u started from the discrete delta at cell `pole`.
EnvelopeReport gaussian_envelope(const SpaceTimeField& gamma, std::size_t pole, const EnvelopeOptions& opts = {});

/// Discrete delta (1 / dx^n at one cell).
ScalarField discrete_delta(const Grid& grid, std::size_t cell);

struct SmallnessReport {
    std::vector<double> t;
    std::vector<double> values;  ///< ||grad u||_{Z(t_k)}
    double ratio = 0.0;          ///< last / first
    bool monotone = true;        ///< non-increasing within 5% ripple
    bool ratio_ok = false;       ///< ratio <= 0.2
};

SmallnessReport z_gradient_smallness(const SpaceTimeField& gradient, double q, std::span<const double> t_list);

} // namespace qlp
