#include "qlp/heat.hpp"

#include "qlp/errors.hpp"
#include "qlp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace qlp {

namespace {

using cplx = std::complex<double>;

std::vector<double> evolve(const Spectrum& s, double t) {
    return s.apply([t](const Spectrum::Mode& m) { return cplx(std::exp(-(m.kx * m.kx + m.ky * m.ky) * t), 0.0); });
}

// d/dx_axis of the evolved field, optionally evaluated half a cell ahead along that axis.
std::vector<double> evolve_derivative(const Spectrum& s, double t, int axis, bool half_shift) {
    const double h = half_shift ? 0.5 * s.grid().spacing() : 0.0;
    return s.apply([t, axis, h](const Spectrum::Mode& m) {
        if (m.nyquist) {
            return cplx(0.0, 0.0);
        }
        const double k = axis == 0 ? m.kx : m.ky;
        const double decay = std::exp(-(m.kx * m.kx + m.ky * m.ky) * t);
        return cplx(0.0, k) * decay * std::polar(1.0, k * h);
    });
}

VectorField gradient_from(const Spectrum& s, double t, GradientPlacement placement) {
    VectorField g{s.grid(), {}};
    for (int a = 0; a < s.grid().dim(); ++a) {
        g.comp[a] = evolve_derivative(s, t, a, placement == GradientPlacement::Faces);
    }
    return g;
}

} // namespace

HeatExtension heat_extend(const ScalarField& u0, std::span<const double> times, GradientPlacement placement) {
    const Grid& g = u0.grid();
    const Spectrum s(g, u0.values());
    HeatExtension out{u0, SpaceTimeField(g, 0), SpaceTimeField(g, g.dim())};
    for (double t : times) {
        if (!(t >= 0.0)) {
            throw Error("heat extension times must be non-negative");
        }
        if (t == 0.0) {
            out.frames.push_scalar(t, u0);
        } else {
            out.frames.push_frame(t, evolve(s, t));
        }
        out.gradient.push_vector(t, gradient_from(s, t, placement));
    }
    return out;
}

ScalarField heat_frame(const ScalarField& u0, double t) {
    if (t == 0.0) {
        return u0;
    }
    const Spectrum s(u0.grid(), u0.values());
    return ScalarField(u0.grid(), evolve(s, t));
}

VectorField heat_gradient(const ScalarField& u0, double t, GradientPlacement placement) {
    const Spectrum s(u0.grid(), u0.values());
    return gradient_from(s, t, placement);
}

std::vector<double> geometric_samples(double horizon, int decades, int per_decade) {
    std::vector<double> ts;
    const int count = decades * per_decade;
    for (int i = count - 1; i >= 0; --i) {
        ts.push_back(horizon * std::pow(10.0, -static_cast<double>(i) / per_decade));
    }
    return ts;
}

namespace {

double weighted_gradient_sup(const Spectrum& s, double t) {
    const VectorField g = gradient_from(s, t, GradientPlacement::Nodes);
    double m = 0.0;
    for (std::size_t c = 0; c < s.grid().size(); ++c) {
        m = std::max(m, g.magnitude(c));
    }
    return std::sqrt(t) * m;
}

} // namespace

HeatGradientSup heat_gradient_sup(const ScalarField& u0, double horizon, const HeatGradientSupOptions& opts) {
    const Spectrum s(u0.grid(), u0.values());
    HeatGradientSup r;
    for (double t : geometric_samples(horizon, opts.decades, opts.per_decade)) {
        const double v = weighted_gradient_sup(s, t);
        if (v > r.value) {
            r.value = v;
            r.argmax_t = t;
        }
    }
    r.bound = (1.0 / std::sqrt(2.0) + opts.slack) * u0.sup_norm();
    r.within_bound = r.value <= r.bound;
    return r;
}

HeatVanishingReport heat_gradient_vanishing(const ScalarField& u0, std::span<const double> t_sequence,
                                            int per_decade) {
    HeatVanishingReport r;
    if (t_sequence.empty()) {
        return r;
    }
    for (std::size_t i = 1; i < t_sequence.size(); ++i) {
        if (!(t_sequence[i] < t_sequence[i - 1])) {
            throw Error("t sequence must be strictly decreasing");
        }
    }
    const double t_max = t_sequence.front();
    const double t_min = t_sequence.back();
    const int decades = static_cast<int>(std::ceil(std::log10(t_max / t_min))) + 3;
    const Spectrum s(u0.grid(), u0.values());
    std::vector<std::pair<double, double>> samples;
    for (double t : geometric_samples(t_max, decades, per_decade)) {
        samples.emplace_back(t, weighted_gradient_sup(s, t));
    }
    for (double tk : t_sequence) {
        double m = 0.0;
        for (const auto& [t, v] : samples) {
            if (t <= tk * (1.0 + 1e-12)) {
                m = std::max(m, v);
            }
        }
        r.t.push_back(tk);
        r.values.push_back(m);
    }
    r.vanishing = r.values.front() == 0.0 || r.values.back() <= 0.5 * r.values.front();
    return r;
}

} // namespace qlp
