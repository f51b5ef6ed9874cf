#pragma once

#include "qlp/field.hpp"

#include <span>
#include <vector>

namespace qlp {

enum class GradientPlacement {
    Nodes,  ///< both components at grid nodes
    Faces,  ///< component a on the +1/2 face along axis a (matches the flux stencil)
};

/// Exact heat extension e^{t Laplacian} u0 on the torus, evaluated spectrally.
struct HeatExtension {
    ScalarField u0;
    SpaceTimeField frames;
    SpaceTimeField gradient;  ///< vector rank dim
};

HeatExtension heat_extend(const ScalarField& u0, std::span<const double> times,
                          GradientPlacement placement = GradientPlacement::Nodes);

/// e^{t Laplacian} u0 at a single time.
ScalarField heat_frame(const ScalarField& u0, double t);
/// Gradient of e^{t Laplacian} u0 at a single time.
VectorField heat_gradient(const ScalarField& u0, double t, GradientPlacement placement = GradientPlacement::Nodes);

/// Geometric sample set: `per_decade` points per decade on (T 10^-decades, T], T included.
std::vector<double> geometric_samples(double horizon, int decades, int per_decade);

struct HeatGradientSupOptions {
    int per_decade = 64;
    int decades = 6;
    double slack = 0.02;  ///< periodisation allowance on the 1/sqrt(2) constant
};

struct HeatGradientSup {
    double value = 0.0;     ///< sup_t sqrt(t) |grad e^{t Lap} u0|
    double argmax_t = 0.0;
    double bound = 0.0;     ///< (1/sqrt(2) + slack) ||u0||_inf
    bool within_bound = true;
};

HeatGradientSup heat_gradient_sup(const ScalarField& u0, double horizon, const HeatGradientSupOptions& opts = {});

struct HeatVanishingReport {
    std::vector<double> t;
    std::vector<double> values;  ///< ||grad E_Id u0||_{L^inf_{-1/2}(t_k)}
    bool vanishing = true;       ///< false when the sequence plateaus (data not BUC at grid scale)
};

/// Weighted sup-norms over (0, t_k] for a decreasing sequence t_k.
HeatVanishingReport heat_gradient_vanishing(const ScalarField& u0, std::span<const double> t_sequence,
                                            int per_decade = 32);

} // namespace qlp
