#include "qlp/coefficient.hpp"

#include "qlp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace qlp {

CoefficientFn::CoefficientFn(std::string label, int dim, OpenInterval admissible, Eval eval, Traits traits)
    : label_(std::move(label)), dim_(dim), admissible_(admissible), eval_(std::move(eval)), traits_(traits) {
    if (dim != 1 && dim != 2) {
        throw Error("coefficient dimension must be 1 or 2");
    }
    if (!(admissible_.lo < admissible_.hi)) {
        throw Error("coefficient '" + label_ + "' has an empty admissible interval");
    }
}

Matrix2 CoefficientFn::operator()(double t, Point x, double y) const {
    if (!admissible_.contains(y)) {
        std::ostringstream os;
        os << "state value " << y << " left the admissible interval of '" << label_ << "' at t=" << t;
        throw RangeEscape(os.str(), y, t);
    }
    Matrix2 m = eval_(t, x, y);
    if (!m.finite()) {
        throw Error("coefficient '" + label_ + "' returned a non-finite entry");
    }
    return m;
}

CoefficientFn CoefficientFn::shifted(double tau) const {
    if (tau == 0.0 || traits_.time_independent) {
        return *this;
    }
    auto inner = eval_;
    return CoefficientFn(label_, dim_, admissible_,
                         [inner, tau](double t, Point x, double y) { return inner(t + tau, x, y); }, traits_);
}

namespace {

double parse_parameter(std::string_view label, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw Error("bad parameter in coefficient label '" + std::string(label) + "'");
    }
    return v;
}

} // namespace

CoefficientFn make_coefficient(std::string_view label, int dim, double box_length) {
    const auto colon = label.find(':');
    const std::string_view kind = label.substr(0, colon);
    const bool has_param = colon != std::string_view::npos;
    const auto param = [&]() {
        if (!has_param) {
            throw Error("coefficient '" + std::string(label) + "' needs a parameter");
        }
        return parse_parameter(label, label.substr(colon + 1));
    };
    const std::string name(label);

    if (kind == "identity") {
        return CoefficientFn(name, dim, {}, [](double, Point, double) { return Matrix2::identity(); },
                             {true, true, true});
    }
    if (kind == "scaled") {
        const double c = param();
        if (!(c > 0.0)) {
            throw Error("scaled coefficient needs c > 0");
        }
        return CoefficientFn(name, dim, {}, [c](double, Point, double) { return Matrix2::scalar(c); },
                             {true, true, true});
    }
    if (kind == "porous") {
        const double m = param();
        if (!(m > 0.0)) {
            throw Error("porous coefficient needs m > 0");
        }
        return CoefficientFn(name, dim, {0.0, std::numeric_limits<double>::infinity()},
                             [m](double, Point, double y) {
                                 return Matrix2::scalar(m == 1.0 ? y : std::pow(y, m));
                             },
                             {false, true, true});
    }
    if (kind == "anisotropic") {
        const double th = param();
        const double c = std::cos(th);
        const double s = std::sin(th);
        // R diag(1, 2) R^T
        const Matrix2 m{c * c + 2.0 * s * s, -c * s, -c * s, s * s + 2.0 * c * c};
        return CoefficientFn(name, dim, {}, [m](double, Point, double) { return m; },
                             {true, true, dim == 1 || m.xy == 0.0});
    }
    if (kind == "time_ramp") {
        const double tau = param();
        if (!(tau >= 0.0)) {
            throw Error("time_ramp needs tau >= 0");
        }
        return CoefficientFn(name, dim, {},
                             [tau](double t, Point, double) { return Matrix2::scalar(1.0 + std::min(t, tau)); },
                             {true, false, true});
    }
    if (kind == "wavy") {
        const double c = param();
        if (!(c > 1.0)) {
            throw Error("wavy coefficient needs c > 1");
        }
        const double k = 2.0 * std::numbers::pi / box_length;
        return CoefficientFn(name, dim, {},
                             [c, k](double, Point x, double) { return Matrix2::scalar(c + std::cos(k * x.x)); },
                             {true, true, true});
    }
    throw Error("unknown coefficient label '" + name + "'");
}

std::vector<std::string> builtin_coefficient_labels() {
    return {"identity", "scaled:c", "porous:m", "anisotropic:theta", "time_ramp:tau", "wavy:c"};
}

namespace {

struct SampleSet {
    std::vector<double> ts;
    std::vector<Point> xs;
    std::vector<double> ys;
};

SampleSet make_samples(Interval k, double horizon, const Grid& grid, const SampleCounts& counts) {
    SampleSet s;
    const int nt = std::max(1, counts.t);
    for (int i = 0; i < nt; ++i) {
        s.ts.push_back(nt == 1 ? 0.0 : horizon * i / (nt - 1));
    }
    const int n = grid.cells_per_axis();
    int nx = counts.x > 0 ? std::min(counts.x, n) : (grid.dim() == 1 ? n : std::min(n, 32));
    const int stride = std::max(1, n / nx);
    for (int j = 0; j < (grid.dim() == 2 ? n : 1); j += stride) {
        for (int i = 0; i < n; i += stride) {
            s.xs.push_back(grid.node(grid.index(i, j)));
        }
    }
    const int ny = std::max(1, counts.y);
    for (int i = 0; i < ny; ++i) {
        s.ys.push_back(ny == 1 ? k.lo : k.lo + (k.hi - k.lo) * i / (ny - 1));
    }
    return s;
}

Matrix2 checked_raw(const CoefficientFn& a, double t, Point x, double y) {
    Matrix2 m = a.raw(t, x, y);
    if (!m.finite()) {
        std::ostringstream os;
        os << "coefficient '" << a.label() << "' is not finite at y=" << y;
        throw Error(os.str());
    }
    return m;
}

} // namespace

double verify_ellipticity(const CoefficientFn& a, Interval k, double horizon, const Grid& grid,
                          const SampleCounts& counts) {
    const auto s = make_samples(k, horizon, grid, counts);
    const int dim = a.dim();
    std::vector<std::pair<double, double>> dirs;
    if (dim == 1) {
        dirs = {{1.0, 0.0}, {-1.0, 0.0}};
    } else {
        const int nd = std::max(1, counts.directions);
        for (int i = 0; i < nd; ++i) {
            const double ang = 2.0 * std::numbers::pi * i / nd;
            dirs.emplace_back(std::cos(ang), std::sin(ang));
        }
    }
    double lam = std::numeric_limits<double>::infinity();
    for (double t : s.ts) {
        for (const Point& x : s.xs) {
            for (double y : s.ys) {
                const Matrix2 m = checked_raw(a, t, x, y);
                for (const auto& [x0, x1] : dirs) {
                    const double q = m.quadratic(dim, x0, x1);
                    if (q <= 0.0) {
                        std::ostringstream os;
                        os << "coefficient '" << a.label() << "' is not elliptic at t=" << t << " x=(" << x.x << ","
                           << x.y << ") y=" << y;
                        throw NotElliptic(os.str(), t, x.x, x.y, y, x0, x1);
                    }
                    lam = std::min(lam, q);
                }
            }
        }
    }
    return lam;
}

LipschitzEquilibrium verify_lipschitz_and_equilibrium(const CoefficientFn& a, Interval k, double horizon,
                                                      const Grid& grid, const SampleCounts& counts) {
    const auto s = make_samples(k, horizon, grid, counts);
    const int dim = a.dim();
    LipschitzEquilibrium out;
    std::vector<Matrix2> column(s.ys.size());
    for (double t : s.ts) {
        for (const Point& x : s.xs) {
            for (std::size_t i = 0; i < s.ys.size(); ++i) {
                column[i] = checked_raw(a, t, x, s.ys[i]);
            }
            for (std::size_t i = 0; i < s.ys.size(); ++i) {
                for (std::size_t j = i + 1; j < s.ys.size(); ++j) {
                    const double dy = std::abs(s.ys[i] - s.ys[j]);
                    if (dy > 0.0) {
                        out.lipschitz = std::max(out.lipschitz, (column[i] - column[j]).frobenius(dim) / dy);
                    }
                }
            }
        }
    }

    auto equilibrium_at = [&](double y0) {
        double e = 0.0;
        for (double t : s.ts) {
            for (const Point& x : s.xs) {
                const Matrix2 m = a.raw(t, x, y0);
                if (!m.finite()) {
                    throw Error("non-finite");
                }
                e = std::max(e, m.frobenius(dim));
            }
        }
        return e;
    };
    try {
        out.equilibrium = equilibrium_at(0.0);
        out.anchored_at_zero = true;
        out.anchor = 0.0;
    } catch (const std::exception&) {
        out.anchor = 0.5 * (k.lo + k.hi);
        out.anchored_at_zero = false;
        out.equilibrium = equilibrium_at(out.anchor);
    }
    return out;
}

AssumptionReport assess_assumptions(const CoefficientFn& a, Interval k, double horizon, const Grid& grid,
                                    const SampleCounts& counts) {
    AssumptionReport r;
    r.k = k;
    r.horizon = horizon;
    r.lambda = verify_ellipticity(a, k, horizon, grid, counts);
    const auto le = verify_lipschitz_and_equilibrium(a, k, horizon, grid, counts);
    r.lipschitz = le.lipschitz;
    r.equilibrium = le.equilibrium;
    r.equilibrium_anchored_at_zero = le.anchored_at_zero;
    r.equilibrium_anchor = le.anchor;

    // Oscillation of a under j-step moves along each of (t, x, y); scale is the
    // Chebyshev length of the move.
    const auto s = make_samples(k, horizon, grid, counts);
    const int dim = a.dim();
    const double dt = s.ts.size() > 1 ? s.ts[1] - s.ts[0] : 0.0;
    const double dy = s.ys.size() > 1 ? s.ys[1] - s.ys[0] : 0.0;
    const double dxs = s.xs.size() > 1 ? grid.distance(s.xs[0], s.xs[1]) : 0.0;
    std::map<double, double> osc;
    for (int j = 1; j <= 4; ++j) {
        for (std::size_t it = 0; it < s.ts.size(); ++it) {
            for (std::size_t ix = 0; ix < s.xs.size(); ++ix) {
                for (std::size_t iy = 0; iy < s.ys.size(); ++iy) {
                    const Matrix2 m = checked_raw(a, s.ts[it], s.xs[ix], s.ys[iy]);
                    if (it + j < s.ts.size()) {
                        const double d = (checked_raw(a, s.ts[it + j], s.xs[ix], s.ys[iy]) - m).frobenius(dim);
                        osc[j * dt] = std::max(osc[j * dt], d);
                    }
                    if (iy + j < s.ys.size()) {
                        const double d = (checked_raw(a, s.ts[it], s.xs[ix], s.ys[iy + j]) - m).frobenius(dim);
                        osc[j * dy] = std::max(osc[j * dy], d);
                    }
                    if (ix + j < s.xs.size() && dim == 1) {
                        const double d = (checked_raw(a, s.ts[it], s.xs[ix + j], s.ys[iy]) - m).frobenius(dim);
                        osc[j * dxs] = std::max(osc[j * dxs], d);
                    }
                }
            }
        }
    }
    double running = 0.0;
    for (const auto& [scale, value] : osc) {
        if (scale <= 0.0) {
            continue;
        }
        running = std::max(running, value);
        r.modulus.emplace_back(scale, running);
    }
    return r;
}

double MatrixSeries::sup_frobenius() const noexcept {
    double m = 0.0;
    for (const auto& f : frames) {
        m = std::max(m, f.sup_frobenius());
    }
    return m;
}

MatrixField compose_coefficient(const CoefficientFn& a, double t, const ScalarField& v) {
    const Grid& g = v.grid();
    MatrixField out{g, std::vector<Matrix2>(g.size())};
    for (std::size_t c = 0; c < g.size(); ++c) {
        out.values[c] = a(t, g.node(c), v[c]);
    }
    return out;
}

MatrixSeries compose_coefficient(const CoefficientFn& a, const SpaceTimeField& v) {
    if (v.vector_rank() != 0) {
        throw Error("compose_coefficient needs a scalar field");
    }
    MatrixSeries out{v.grid(), {v.times().begin(), v.times().end()}, {}};
    out.frames.reserve(v.frame_count());
    for (std::size_t k = 0; k < v.frame_count(); ++k) {
        out.frames.push_back(compose_coefficient(a, v.time(k), v.scalar(k)));
    }
    return out;
}

bool within_composition_bound(const MatrixSeries& composed, double v_sup, const AssumptionReport& report,
                              double slack) {
    const double shift = report.equilibrium_anchored_at_zero ? 0.0 : std::abs(report.equilibrium_anchor);
    const double bound = report.lipschitz * (v_sup + shift) + report.equilibrium;
    return composed.sup_frobenius() <= bound * (1.0 + slack) + slack;
}

double safety_radius(const ScalarField& u0, const OpenInterval& admissible, double cap) {
    const Interval r = essential_range(u0);
    if (!admissible.contains(r)) {
        throw Error("range of the initial datum is not strictly inside the admissible interval");
    }
    double d = std::numeric_limits<double>::infinity();
    if (std::isfinite(admissible.lo)) {
        d = std::min(d, r.lo - admissible.lo);
    }
    if (std::isfinite(admissible.hi)) {
        d = std::min(d, admissible.hi - r.hi);
    }
    return std::isfinite(d) ? 0.5 * d : cap;
}

double validity_horizon(const Grid& grid, double lambda) {
    const double l8 = grid.box_length() / 8.0;
    return l8 * l8 / lambda;
}

} // namespace qlp
