#pragma once

#include "qlp/field.hpp"

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace qlp {

/// Open interval (lo, hi); either end may be infinite.
struct OpenInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double y) const noexcept { return y > lo && y < hi; }
    bool contains(const Interval& k) const noexcept { return k.lo > lo && k.hi < hi; }
};

/// The nonlinearity a(t, x, y) with its admissible state interval O.
class CoefficientFn {
public:
    using Eval = std::function<Matrix2(double t, Point x, double y)>;

    struct Traits {
        bool state_independent = false;
        bool time_independent = false;
        bool diagonal = true;
    };

    CoefficientFn(std::string label, int dim, OpenInterval admissible, Eval eval, Traits traits);

    /// Evaluates a(t, x, y); throws RangeEscape if y is not in O.
    Matrix2 operator()(double t, Point x, double y) const;
    /// Evaluates without the O guard. May throw or return non-finite entries.
    Matrix2 raw(double t, Point x, double y) const { return eval_(t, x, y); }

    const std::string& label() const noexcept { return label_; }
    int dim() const noexcept { return dim_; }
    const OpenInterval& admissible() const noexcept { return admissible_; }
    const Traits& traits() const noexcept { return traits_; }

    /// a~(t, x, y) = a(t + tau, x, y).
    CoefficientFn shifted(double tau) const;

private:
    std::string label_;
    int dim_;
    OpenInterval admissible_;
    Eval eval_;
    Traits traits_;
};

/// Builds a built-in coefficient from its label:
///   identity, scaled:c, porous:m, anisotropic:theta, time_ramp:tau, wavy:c.
/// wavy:c is (c + cos(2 pi x0 / L)) Id and needs the box length.
CoefficientFn make_coefficient(std::string_view label, int dim, double box_length = 1.0);
std::vector<std::string> builtin_coefficient_labels();

/// Sampling densities for the Assumption A checks.
struct SampleCounts {
    int t = 17;
    int x = 0;  ///< 0 means one sample per grid cell per axis.
    int y = 65;
    int directions = 32;
};

struct LipschitzEquilibrium {
    double lipschitz = 0.0;    ///< C_L estimate (Frobenius norm)
    double equilibrium = 0.0;  ///< C_E estimate
    bool anchored_at_zero = true;
    double anchor = 0.0;       ///< y at which C_E was evaluated
};

struct AssumptionReport {
    double lambda = 0.0;
    double lipschitz = 0.0;
    double equilibrium = 0.0;
    bool equilibrium_anchored_at_zero = true;
    double equilibrium_anchor = 0.0;
    std::vector<std::pair<double, double>> modulus;  ///< (scale, oscillation), non-decreasing
    Interval k;
    double horizon = 0.0;
};

/// min over samples of xi^T sym(a) xi on [0,T] x box x K x unit sphere.
/// Throws NotElliptic if the minimum is not positive.
double verify_ellipticity(const CoefficientFn& a, Interval k, double horizon, const Grid& grid,
                          const SampleCounts& counts = {});

LipschitzEquilibrium verify_lipschitz_and_equilibrium(const CoefficientFn& a, Interval k, double horizon,
                                                      const Grid& grid, const SampleCounts& counts = {});

/// Ellipticity, Lipschitz, equilibrium and a sampled uniform-continuity modulus.
AssumptionReport assess_assumptions(const CoefficientFn& a, Interval k, double horizon, const Grid& grid,
                                    const SampleCounts& counts = {});

/// Matrix frames A(t_k, x) = a(t_k, x, v(t_k, x)).
struct MatrixSeries {
    Grid grid;
    std::vector<double> times;
    std::vector<MatrixField> frames;

    double sup_frobenius() const noexcept;
};

MatrixField compose_coefficient(const CoefficientFn& a, double t, const ScalarField& v);
MatrixSeries compose_coefficient(const CoefficientFn& a, const SpaceTimeField& v);

/// |A| <= C_L ||v||_inf + C_E at every sample (with relative slack).
bool within_composition_bound(const MatrixSeries& composed, double v_sup, const AssumptionReport& report,
                              double slack = 1e-12);

/// r = (1/2) dist(range(u0), boundary O); cap when O is the whole line.
double safety_radius(const ScalarField& u0, const OpenInterval& admissible, double cap = 1.0);

/// Validity horizon (L/8)^2 / lambda of the torus stand-in for R^n.
double validity_horizon(const Grid& grid, double lambda);

} // namespace qlp
