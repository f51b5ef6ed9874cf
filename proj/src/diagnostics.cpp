#include "qlp/diagnostics.hpp"

#include "qlp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qlp {

double discrete_lipschitz(const ScalarField& u) {
    const Grid& g = u.grid();
    double m = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            m = std::max(m, std::abs(u[g.neighbor(c, a, 1)] - u[c]));
        }
    }
    return m / g.spacing();
}

RangeReport range_invariance(const SpaceTimeField& u, const ScalarField& u0, double containment_rel,
                             double equality_slack) {
    RangeReport r;
    r.initial = essential_range(u0);
    const std::size_t first = (u.frame_count() > 1 && u.time(0) == 0.0) ? 1 : 0;
    r.evolved = essential_range(u, first);
    r.excess = std::max({0.0, r.evolved.hi - r.initial.hi, r.initial.lo - r.evolved.lo});
    r.inner_gap = std::max({0.0, r.initial.hi - r.evolved.hi, r.evolved.lo - r.initial.lo});
    r.containment_tolerance = containment_rel * u0.sup_norm();
    r.equality_slack = equality_slack >= 0.0 ? equality_slack : 2.0 * u0.grid().spacing() * discrete_lipschitz(u0);
    r.contained = r.excess <= r.containment_tolerance;
    r.equal = r.contained && r.inner_gap <= r.equality_slack;
    return r;
}

namespace {

std::vector<std::pair<int, int>> disc_offsets(const Grid& g, double rho) {
    const int n = g.cells_per_axis();
    const int r = std::min(static_cast<int>(std::floor(rho / g.spacing() + 1e-12)), n / 2);
    std::vector<std::pair<int, int>> out;
    for (int dy = (g.dim() == 2 ? -r : 0); dy <= (g.dim() == 2 ? r : 0); ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (std::hypot(dx, dy) * g.spacing() <= rho + 1e-12 * g.spacing()) {
                out.emplace_back(dx, dy);
            }
        }
    }
    return out;
}

} // namespace

std::vector<std::pair<double, double>> modulus_of_continuity(const SpaceTimeField& u, std::span<const double> scales,
                                                             const ModulusOptions& opts) {
    const Grid& g = u.grid();
    std::vector<std::size_t> bases;
    for (std::size_t k = 0; k < u.frame_count(); ++k) {
        if (u.time(k) >= opts.t_from && u.time(k) <= opts.t_to) {
            bases.push_back(k);
        }
    }
    if (bases.size() > opts.max_base_times && opts.max_base_times > 0) {
        std::vector<std::size_t> thinned;
        for (std::size_t i = 0; i < opts.max_base_times; ++i) {
            thinned.push_back(bases[i * (bases.size() - 1) / (opts.max_base_times - 1 ? opts.max_base_times - 1 : 1)]);
        }
        thinned.erase(std::unique(thinned.begin(), thinned.end()), thinned.end());
        bases = std::move(thinned);
    }

    std::vector<double> sorted(scales.begin(), scales.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> out;
    double running = 0.0;
    for (double rho : sorted) {
        const auto offsets = disc_offsets(g, rho);
        double omega = 0.0;
        for (std::size_t kb : bases) {
            const double t = u.time(kb);
            std::vector<double> hi(g.size(), -std::numeric_limits<double>::infinity());
            std::vector<double> lo(g.size(), std::numeric_limits<double>::infinity());
            for (std::size_t k = 0; k <= kb; ++k) {
                if (u.time(k) <= t - rho * rho && k != kb) {
                    continue;
                }
                const auto f = u.frame(k);
                for (std::size_t c = 0; c < g.size(); ++c) {
                    hi[c] = std::max(hi[c], f[c]);
                    lo[c] = std::min(lo[c], f[c]);
                }
            }
            for (std::size_t c = 0; c < g.size(); ++c) {
                const auto xy = g.coords(c);
                double bhi = -std::numeric_limits<double>::infinity();
                double blo = std::numeric_limits<double>::infinity();
                for (const auto& [dx, dy] : offsets) {
                    const std::size_t nb = g.index(xy[0] + dx, xy[1] + dy);
                    bhi = std::max(bhi, hi[nb]);
                    blo = std::min(blo, lo[nb]);
                }
                omega = std::max(omega, bhi - blo);
            }
        }
        running = std::max(running, omega);
        out.emplace_back(rho, running);
    }
    return out;
}

DecayReport long_time_decay(const SpaceTimeField& u, double c, double fit_from, double fit_to, double validity) {
    DecayReport r;
    r.c = c;
    for (std::size_t k = 0; k < u.frame_count(); ++k) {
        double m = 0.0;
        for (double v : u.frame(k)) {
            m = std::max(m, std::abs(v - c));
        }
        r.times.push_back(u.time(k));
        r.sup_dist.push_back(m);
    }
    r.fit_from = fit_from;
    r.fit_to = std::min(fit_to, validity);
    if (fit_to > validity) {
        r.caveat = "fit window clipped at the torus validity horizon";
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        const double t = r.times[k];
        if (t >= r.fit_from && t <= r.fit_to && t > 0.0) {
            if (r.sup_dist[k] <= 0.0) {
                continue;
            }
            if (!xs.empty() && r.sup_dist[k] > std::exp(ys.back()) * (1.0 + 1e-12)) {
                r.monotone_tail = false;
            }
            xs.push_back(std::log(t));
            ys.push_back(std::log(r.sup_dist[k]));
        }
    }
    r.fit_points = xs.size();
    const bool all_zero = std::all_of(r.sup_dist.begin(), r.sup_dist.end(), [](double d) { return d == 0.0; });
    if (all_zero) {
        return r;
    }
    if (xs.size() < 5) {
        throw Error("decay fit window holds fewer than 5 frames; enlarge the box length L");
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    r.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return r;
}

ScalarField discrete_delta(const Grid& grid, std::size_t cell) {
    std::vector<double> v(grid.size(), 0.0);
    v.at(cell) = 1.0 / grid.cell_volume();
    return ScalarField(grid, std::move(v));
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, v.size() - 1);
    return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
}

// Least-squares line y = a + b x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {(sy - b * sx) / n, b};
}

} // namespace

EnvelopeReport gaussian_envelope(const SpaceTimeField& gamma, std::size_t pole, const EnvelopeOptions& opts) {
    const Grid& g = gamma.grid();
    const double radius = opts.probe_radius > 0.0 ? opts.probe_radius : 0.25 * g.box_length();
    const double half_dim = 0.5 * g.dim();
    const Point y0 = g.node(pole);
    EnvelopeReport r;
    r.min_value = std::numeric_limits<double>::infinity();

    struct Sample {
        double z;
        double w;
    };
    std::vector<Sample> samples;
    for (std::size_t k = 0; k < gamma.frame_count(); ++k) {
        const double t = gamma.time(k);
        if (t <= 0.0) {
            continue;
        }
        const auto f = gamma.frame(k);
        double mass = 0.0;
        for (double v : f) {
            mass += v;
        }
        r.mass_defect = std::max(r.mass_defect, std::abs(mass * g.cell_volume() - 1.0));
        if (t < opts.t_from || t > opts.t_to) {
            continue;
        }
        const double scale = std::pow(t, half_dim);
        for (std::size_t c = 0; c < g.size(); ++c) {
            const double rho = g.distance(g.node(c), y0);
            if (rho > radius) {
                continue;
            }
            r.min_value = std::min(r.min_value, f[c]);
            if (f[c] <= 0.0) {
                if (f[c] < -1e-12 && r.positive) {
                    r.failure = "negative Gamma at cell " + std::to_string(c) + ", t=" + std::to_string(t);
                }
                r.positive = false;
                continue;
            }
            samples.push_back({rho * rho / t, f[c] * scale});
        }
    }
    r.samples = samples.size();
    if (!r.positive) {
        if (r.failure.empty()) {
            r.failure = "Gamma vanishes on the probe region";
        }
        return r;
    }
    if (samples.size() < 8) {
        r.failure = "too few probe samples";
        return r;
    }

    // Per annulus in z = rho^2 / t, take the samples at the lower and upper
    // quantiles of log w and fit a line through each family.
    double zmax = 0.0;
    for (const auto& s : samples) {
        zmax = std::max(zmax, s.z);
    }
    std::vector<std::vector<Sample>> bins(static_cast<std::size_t>(opts.bins));
    for (const auto& s : samples) {
        auto b = static_cast<std::size_t>(std::min<double>(opts.bins - 1, std::floor(s.z / zmax * opts.bins)));
        bins[b].push_back(s);
    }
    std::vector<double> lz, lw, uz, uw;
    for (auto& bin : bins) {
        if (bin.empty()) {
            continue;
        }
        std::vector<double> logs;
        for (const auto& s : bin) {
            logs.push_back(std::log(s.w));
        }
        const double lq = quantile(logs, opts.lower_quantile);
        const double uq = quantile(logs, opts.upper_quantile);
        const auto nearest = [&](double target) {
            const Sample* best = &bin.front();
            for (const auto& s : bin) {
                if (std::abs(std::log(s.w) - target) < std::abs(std::log(best->w) - target)) {
                    best = &s;
                }
            }
            return *best;
        };
        const Sample lo = nearest(lq);
        const Sample hi = nearest(uq);
        lz.push_back(lo.z);
        lw.push_back(std::log(lo.w));
        uz.push_back(hi.z);
        uw.push_back(std::log(hi.w));
    }
    if (lz.size() < 3) {
        r.failure = "too few annuli for a fit";
        return r;
    }
    r.lower_rate = -fit_line(lz, lw).second;
    r.upper_rate = -fit_line(uz, uw).second;
    if (!(r.lower_rate > 0.0) || !(r.upper_rate > 0.0)) {
        r.failure = "fitted Gaussian rate is not positive";
        return r;
    }
    // Constants tight enough that both envelopes hold at every sample.
    r.lower_constant = std::numeric_limits<double>::infinity();
    r.upper_constant = 0.0;
    for (const auto& s : samples) {
        r.lower_constant = std::min(r.lower_constant, s.w * std::exp(r.lower_rate * s.z));
        r.upper_constant = std::max(r.upper_constant, s.w * std::exp(r.upper_rate * s.z));
    }
    bool ordered = true;
    for (const auto& s : samples) {
        ordered = ordered && r.lower_constant * std::exp(-r.lower_rate * s.z) <=
                                 r.upper_constant * std::exp(-r.upper_rate * s.z) * (1.0 + 1e-12);
    }
    r.pass = r.lower_constant > 0.0 && ordered;
    if (!ordered) {
        r.failure = "lower envelope exceeds upper envelope";
    }
    return r;
}

SmallnessReport z_gradient_smallness(const SpaceTimeField& gradient, double q, std::span<const double> t_list) {
    SmallnessReport r;
    for (std::size_t i = 1; i < t_list.size(); ++i) {
        if (!(t_list[i] < t_list[i - 1])) {
            throw Error("z_gradient_smallness needs a decreasing t list");
        }
    }
    for (double t : t_list) {
        r.t.push_back(t);
        r.values.push_back(z_norm(gradient, ZNormOptions{q, t, {}}).value);
    }
    for (std::size_t i = 1; i < r.values.size(); ++i) {
        if (r.values[i] > r.values[i - 1] * 1.05 + 1e-300) {
            r.monotone = false;
        }
    }
    r.ratio = r.values.empty() || r.values.front() == 0.0 ? 0.0 : r.values.back() / r.values.front();
    r.ratio_ok = r.ratio <= 0.2;
    return r;
}

} // namespace qlp
