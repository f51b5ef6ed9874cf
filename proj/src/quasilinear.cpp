#include "qlp/quasilinear.hpp"

#include "qlp/diagnostics.hpp"
#include "qlp/errors.hpp"
#include "qlp/norms.hpp"
#include "qlp/stencil.hpp"
#include "qlp/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <sstream>

namespace qlp {

void FixedPointConfig::validate(int dim, double r_sharp) const {
    if (!(q > dim + 2.0)) {
        throw ConfigError("fixed_point.q", "must exceed n + 2 = " + std::to_string(dim + 2));
    }
    if (!(r > 0.0)) {
        throw ConfigError("fixed_point.r", "must be positive");
    }
    if (r_sharp > 0.0 && !(r < r_sharp)) {
        throw ConfigError("fixed_point.r", "must be below the safety radius " + std::to_string(r_sharp));
    }
    if (!(horizon > 0.0)) {
        throw ConfigError("fixed_point.T", "must be positive");
    }
    if (max_iters < 1) {
        throw ConfigError("fixed_point.max_iters", "must be at least 1");
    }
    if (!(fp_tol > 0.0)) {
        throw ConfigError("fixed_point.fp_tol", "must be positive");
    }
    if (contraction_window < 1) {
        throw ConfigError("fixed_point.contraction_window", "must be at least 1");
    }
    if (!(theta >= 0.5 && theta <= 1.0)) {
        throw ConfigError("scheme.theta", "must lie in [0.5, 1]");
    }
    if (!(max_step > 0.0) || !(first_step > 0.0) || !(growth >= 1.0)) {
        throw ConfigError("scheme.dt", "steps must be positive and growth >= 1");
    }
    if (z_samples < 2) {
        throw ConfigError("fixed_point.z_samples", "must be at least 2");
    }
}

std::vector<double> FixedPointConfig::window_times(double length) const {
    return graded_times(length, std::min(max_step, length / 8.0), std::min(first_step, length / 64.0), growth);
}

double SolveReport::max_contraction_factor() const {
    double m = 0.0;
    for (const auto& w : contraction_factors) {
        for (double f : w) {
            m = std::max(m, f);
        }
    }
    return m;
}

int SolveReport::total_iterations() const {
    int n = 0;
    for (int i : iterations) {
        n += i;
    }
    return n;
}

namespace {

// Log-spaced subset of the positive frame times.
std::vector<double> z_sample_times(std::span<const double> times, int count) {
    std::vector<double> pos;
    for (double t : times) {
        if (t > 0.0) {
            pos.push_back(t);
        }
    }
    if (pos.size() <= static_cast<std::size_t>(count)) {
        return pos;
    }
    std::vector<double> out;
    const double lo = pos.front();
    const double hi = pos.back();
    for (int i = 0; i < count; ++i) {
        const double target = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
        auto it = std::lower_bound(pos.begin(), pos.end(), target * (1.0 - 1e-12));
        const double t = it == pos.end() ? hi : *it;
        if (out.empty() || t > out.back()) {
            out.push_back(t);
        }
    }
    return out;
}

SpaceTimeField constant_in_time(const ScalarField& u0, std::span<const double> times) {
    SpaceTimeField v(u0.grid(), 0);
    for (double t : times) {
        v.push_scalar(t, u0);
    }
    return v;
}

SpaceTimeField gradient_frames(const SpaceTimeField& u) {
    SpaceTimeField g(u.grid(), u.grid().dim());
    for (std::size_t k = 0; k < u.frame_count(); ++k) {
        g.push_vector(u.time(k), face_gradient(u.grid(), u.frame(k)));
    }
    return g;
}

double sup_distance(const SpaceTimeField& a, const SpaceTimeField& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.frame_count(); ++k) {
        const auto x = a.frame(k);
        const auto y = b.frame(k);
        for (std::size_t c = 0; c < x.size(); ++c) {
            d = std::max(d, std::abs(x[c] - y[c]));
        }
    }
    return d;
}

double range_drift(const SpaceTimeField& u, const ScalarField& u0) {
    const Interval r0 = essential_range(u0);
    const Interval r = essential_range(u);
    return std::max({0.0, r.hi - r0.hi, r0.lo - r.lo});
}

// sup_k,x |a(t_k, x, u0) - a(0, x, u0)|
double time_oscillation(const CoefficientFn& a, const ScalarField& u0, std::span<const double> times) {
    const MatrixField a0 = compose_coefficient(a, 0.0, u0);
    const int dim = u0.grid().dim();
    double osc = 0.0;
    if (a.traits().time_independent) {
        return 0.0;
    }
    for (double t : times) {
        const MatrixField at = compose_coefficient(a, t, u0);
        for (std::size_t c = 0; c < at.values.size(); ++c) {
            osc = std::max(osc, (at.values[c] - a0.values[c]).frobenius(dim));
        }
    }
    return osc;
}

void fill_ledger(SolveReport& rep, const CoefficientFn& a, const ScalarField& u0, const FixedPointConfig& cfg,
                 std::span<const double> first_window) {
    const Grid& g = u0.grid();
    const Interval r0 = essential_range(u0);
    Interval k{r0.lo - cfg.r, r0.hi + cfg.r};
    const OpenInterval& o = a.admissible();
    // K must stay inside O; the radius bound guarantees it, clamp for safety.
    if (std::isfinite(o.lo)) {
        k.lo = std::max(k.lo, 0.5 * (o.lo + r0.lo));
    }
    if (std::isfinite(o.hi)) {
        k.hi = std::min(k.hi, 0.5 * (o.hi + r0.hi));
    }
    SampleCounts counts;
    counts.t = a.traits().time_independent ? 1 : 9;
    counts.y = a.traits().state_independent ? 1 : 33;
    counts.directions = 16;
    const double horizon = first_window.back();
    const auto le = verify_lipschitz_and_equilibrium(a, k, horizon, g, counts);
    rep.lipschitz_times_r = le.lipschitz * cfg.r;
    rep.time_oscillation = time_oscillation(a, u0, first_window);
    const double lambda = verify_ellipticity(a, k, horizon, g, counts);
    rep.validity_horizon = validity_horizon(g, lambda);
}

} // namespace

double x_norm(const SpaceTimeField& w, const SpaceTimeField& grad_w, double q, int z_samples) {
    const double sup = w.sup_norm();
    if (grad_w.sup_norm() == 0.0) {
        return sup;
    }
    ZNormOptions opts{q, grad_w.times().back(), z_sample_times(grad_w.times(), z_samples)};
    return sup + z_norm(grad_w, opts).value;
}

BallMembership ball_membership(const SpaceTimeField& v, const SpaceTimeField& grad_v, const ScalarField& u0,
                               double r, double q, int z_samples) {
    BallMembership b;
    for (std::size_t k = 0; k < v.frame_count(); ++k) {
        const auto f = v.frame(k);
        for (std::size_t c = 0; c < f.size(); ++c) {
            b.sup_dist = std::max(b.sup_dist, std::abs(f[c] - u0[c]));
        }
    }
    if (grad_v.sup_norm() > 0.0) {
        ZNormOptions opts{q, grad_v.times().back(), z_sample_times(grad_v.times(), z_samples)};
        b.grad_z = z_norm(grad_v, opts).value;
    }
    b.in_ball = b.sup_dist <= r && b.grad_z <= r;
    return b;
}

LinearSolution theta_map(const SpaceTimeField& v, const ScalarField& u0, const CoefficientFn& a, double theta) {
    if (v.vector_rank() != 0 || !(v.grid() == u0.grid())) {
        throw Error("theta_map needs a scalar iterate on the datum's grid");
    }
    MatrixField a0 = compose_coefficient(a, 0.0, u0);
    auto iterate = std::make_shared<SpaceTimeField>(v);
    LinearProblem p = LinearProblem::autonomous(a0, u0, {v.times().begin(), v.times().end()}, theta);
    if (!a.traits().state_independent || !a.traits().time_independent) {
        p.source = [iterate, a0, a](std::size_t k) {
            MatrixField diff = compose_coefficient(a, iterate->time(k), iterate->scalar(k));
            for (std::size_t c = 0; c < diff.values.size(); ++c) {
                diff.values[c] = diff.values[c] - a0.values[c];
            }
            return face_flux(diff, iterate->frame(k));
        };
    }
    return solve_linear(p);
}

SpaceTimeField quasilinear_flux(const CoefficientFn& a, const SpaceTimeField& u) {
    SpaceTimeField flux(u.grid(), u.grid().dim());
    for (std::size_t k = 0; k < u.frame_count(); ++k) {
        flux.push_vector(u.time(k), face_flux(compose_coefficient(a, u.time(k), u.scalar(k)), u.frame(k)));
    }
    return flux;
}

QuasilinearSolution direct_solve(const ScalarField& u0, const CoefficientFn& a, std::span<const double> times,
                                 double theta, int corrections) {
    if (times.size() < 2 || times.front() != 0.0) {
        throw Error("direct_solve needs a time grid starting at 0");
    }
    if (corrections < 0) {
        throw Error("direct_solve needs a non-negative number of corrections");
    }
    const Grid& g = u0.grid();
    QuasilinearSolution out{SpaceTimeField(g, 0), SpaceTimeField(g, g.dim()), SpaceTimeField(g, g.dim())};
    ScalarField u = u0;
    auto record = [&](double t, const ScalarField& w) {
        out.u.push_scalar(t, w);
        out.grad_u.push_vector(t, face_gradient(g, w.values()));
        out.flux.push_vector(t, face_flux(compose_coefficient(a, t, w), w.values()));
    };
    record(0.0, u);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double t0 = times[k];
        const double t1 = times[k + 1];
        const MatrixField a_old = compose_coefficient(a, t0, u);
        ScalarField implicit_state = u;
        ScalarField next;
        for (int pass = 0; pass <= corrections; ++pass) {
            MatrixField a_new = compose_coefficient(a, t1, implicit_state);
            LinearProblem p;
            p.u0 = u;
            p.times = {0.0, t1 - t0};
            p.coefficient = [&a_old, a_new](std::size_t node) { return node == 0 ? a_old : a_new; };
            p.theta = theta;
            LinearSolution step = solve_linear(p);
            next = step.u.scalar(1);
            implicit_state = next;
            if (a.traits().state_independent) {
                break;
            }
        }
        u = next;
        record(t1, u);
    }
    return out;
}

std::pair<QuasilinearSolution, SolveReport> local_solve_fixed_point(const ScalarField& u0, const CoefficientFn& a,
                                                                    const FixedPointConfig& cfg) {
    const Grid& g = u0.grid();
    const double r_sharp = safety_radius(u0, a.admissible(), kInfinity);
    cfg.validate(g.dim(), std::isfinite(r_sharp) ? r_sharp : 0.0);
    const std::vector<double> times = cfg.window_times(cfg.horizon);

    SolveReport rep;
    rep.windows.emplace_back(0.0, cfg.horizon);
    rep.contraction_factors.emplace_back();
    rep.membership.emplace_back();
    fill_ledger(rep, a, u0, cfg, times);

    SpaceTimeField v = constant_in_time(u0, times);
    SpaceTimeField grad_v = gradient_frames(v);
    rep.membership.back().push_back(ball_membership(v, grad_v, u0, cfg.r, cfg.q, cfg.z_samples));

    const double scale = std::max(u0.sup_norm(), 1e-300);
    const double noise = 1e-13 * std::max(1.0, u0.sup_norm());
    double prev_diff = -1.0;
    LinearSolution current;
    bool converged = false;
    int evaluations = 0;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        current = theta_map(v, u0, a, cfg.theta);
        ++evaluations;
        const BallMembership m = ball_membership(current.u, current.grad_u, u0, cfg.r, cfg.q, cfg.z_samples);
        rep.membership.back().push_back(m);
        if (!m.in_ball) {
            std::ostringstream os;
            os << "iterate " << it << " left the ball: sup distance " << m.sup_dist << ", Z gradient " << m.grad_z
               << ", radius " << cfg.r;
            throw ContractionFailure(os.str(), rep.max_contraction_factor(), true);
        }
        const double diff = x_norm(current.u.minus(v), current.grad_u.minus(grad_v), cfg.q, cfg.z_samples);
        if (prev_diff > noise) {
            rep.contraction_factors.back().push_back(diff / prev_diff);
        }
        prev_diff = diff;
        v = current.u;
        grad_v = current.grad_u;
        if (diff <= cfg.fp_tol * scale) {
            rep.iterations.push_back(it - 1);
            converged = true;
            break;
        }
        const auto& f = rep.contraction_factors.back();
        const auto w = static_cast<std::size_t>(cfg.contraction_window);
        if (f.size() >= w && std::all_of(f.end() - w, f.end(), [](double x) { return x >= 1.0; })) {
            std::ostringstream os;
            os << "Picard iteration is not contracting (factor " << f.back() << " after " << it << " iterations)";
            throw ContractionFailure(os.str(), f.back(), false);
        }
    }
    rep.map_evaluations.push_back(evaluations);
    const auto& f = rep.contraction_factors.back();
    const std::size_t w = std::min(f.size(), static_cast<std::size_t>(cfg.contraction_window));
    const double final_factor = w == 0 ? 0.0 : *std::max_element(f.end() - w, f.end());
    if (!converged) {
        std::ostringstream os;
        os << "no fixed point within " << cfg.max_iters << " iterations (last factor " << final_factor << ")";
        throw ContractionFailure(os.str(), final_factor, false);
    }
    if (final_factor >= 1.0) {
        std::ostringstream os;
        os << "empirical contraction factor " << final_factor << " is not below 1";
        throw ContractionFailure(os.str(), final_factor, false);
    }

    QuasilinearSolution sol{std::move(current.u), std::move(current.grad_u), {}};
    sol.flux = quasilinear_flux(a, sol.u);
    rep.range_drift = range_drift(sol.u, u0);
    if (cfg.compare_oracle) {
        rep.oracle_gap = sup_distance(sol.u, direct_solve(u0, a, times, cfg.theta).u);
    }
    return {std::move(sol), std::move(rep)};
}

std::pair<QuasilinearSolution, SolveReport> global_solve(const ScalarField& u0, const CoefficientFn& a, double t_end,
                                                         const FixedPointConfig& cfg) {
    if (!(t_end > 0.0)) {
        throw Error("global_solve needs T_end > 0");
    }
    const Grid& g = u0.grid();
    QuasilinearSolution out{SpaceTimeField(g, 0), SpaceTimeField(g, g.dim()), SpaceTimeField(g, g.dim())};
    SolveReport rep;
    FixedPointConfig local = cfg;
    local.compare_oracle = false;

    double tau = 0.0;
    double length = cfg.horizon;
    int successes = 0;
    ScalarField datum = u0;
    const double underflow = 1e-6 * t_end;
    while (t_end - tau > 1e-12 * t_end) {
        double step = std::min(length, t_end - tau);
        // Avoid a sliver window at the end.
        if (t_end - tau - step < 1e-9 * t_end) {
            step = t_end - tau;
        }
        local.horizon = step;
        const CoefficientFn shifted = a.shifted(tau);
        try {
            auto [piece, piece_rep] = local_solve_fixed_point(datum, shifted, local);
            const std::size_t first = out.u.empty() ? 0 : 1;
            for (std::size_t k = first; k < piece.u.frame_count(); ++k) {
                const double t = k + 1 == piece.u.frame_count() ? tau + step : tau + piece.u.time(k);
                out.u.push_frame(t, {piece.u.frame(k).begin(), piece.u.frame(k).end()});
                out.grad_u.push_frame(t, {piece.grad_u.frame(k).begin(), piece.grad_u.frame(k).end()});
                out.flux.push_frame(t, {piece.flux.frame(k).begin(), piece.flux.frame(k).end()});
            }
            if (rep.windows.empty()) {
                rep.lipschitz_times_r = piece_rep.lipschitz_times_r;
                rep.time_oscillation = piece_rep.time_oscillation;
                rep.validity_horizon = piece_rep.validity_horizon;
            }
            rep.windows.emplace_back(tau, tau + step);
            rep.iterations.push_back(piece_rep.iterations.front());
            rep.map_evaluations.push_back(piece_rep.map_evaluations.front());
            rep.contraction_factors.push_back(piece_rep.contraction_factors.front());
            rep.membership.push_back(piece_rep.membership.front());
            datum = piece.u.scalar(piece.u.frame_count() - 1);
            tau = rep.windows.back().second;
            if (++successes >= 3) {
                length = std::min(2.0 * length, cfg.horizon);
                successes = 0;
            }
        } catch (const ContractionFailure& e) {
            rep.rejected_windows.emplace_back(tau, tau + step);
            length = 0.5 * step;
            successes = 0;
            if (length < underflow) {
                std::ostringstream os;
                os << "window underflow at t=" << tau << " (length " << length << "): " << e.what();
                throw SolverError(os.str());
            }
        }
    }
    rep.range_drift = range_drift(out.u, u0);
    if (cfg.compare_oracle) {
        rep.oracle_gap = sup_distance(out.u, direct_solve(u0, a, out.u.times(), cfg.theta).u);
    }
    return {std::move(out), std::move(rep)};
}

ScalarField mollify(const ScalarField& u0, double eps) {
    if (!(eps > 0.0)) {
        throw Error("mollification radius must be positive");
    }
    const Grid& g = u0.grid();
    const int n = g.cells_per_axis();
    const double dx = g.spacing();
    const int reach = std::min(n / 2, static_cast<int>(std::ceil(eps / dx)));
    struct Tap {
        int di;
        int dj;
        double w;
    };
    std::vector<Tap> taps;
    double total = 0.0;
    const int jr = g.dim() == 2 ? reach : 0;
    for (int dj = -jr; dj <= jr; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
            const double s2 = (di * dx * di * dx + dj * dx * dj * dx) / (eps * eps);
            if (s2 < 1.0) {
                const double w = std::exp(-1.0 / (1.0 - s2));
                taps.push_back({di, dj, w});
                total += w;
            }
        }
    }
    if (taps.empty()) {
        return u0;
    }
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto [i, j] = g.coords(c);
        double s = 0.0;
        for (const Tap& t : taps) {
            s += t.w * u0[g.index(i + t.di, j + t.dj)];
        }
        out[c] = s / total;
    }
    return ScalarField(g, std::move(out));
}

double space_time_l2_distance(const SpaceTimeField& a, const SpaceTimeField& b, double t_from, double t_to,
                              int samples) {
    if (samples < 2 || !(t_to > t_from)) {
        throw Error("L2 distance needs t_from < t_to and at least two samples");
    }
    const double vol = a.grid().cell_volume();
    const double h = (t_to - t_from) / (samples - 1);
    double s = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = t_from + i * h;
        const auto x = a.sample_at(t);
        const auto y = b.sample_at(t);
        double frame = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) {
            frame += (x[c] - y[c]) * (x[c] - y[c]);
        }
        s += (i == 0 || i == samples - 1 ? 0.5 : 1.0) * frame * vol;
    }
    return std::sqrt(s * h);
}

MollifyReport mollify_solve(const ScalarField& u0, const CoefficientFn& a, std::vector<double> eps_list, double t_end,
                            const FixedPointConfig& cfg) {
    if (eps_list.empty()) {
        throw Error("mollify_solve needs at least one eps");
    }
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) {
            throw Error("eps list must be strictly decreasing");
        }
    }
    const Interval r0 = essential_range(u0);
    if (!a.admissible().contains(r0)) {
        throw RangeEscape("convex hull of the rough datum is not inside the admissible interval", r0.lo, 0.0);
    }
    std::vector<std::future<MollifyRun>> jobs;
    for (double eps : eps_list) {
        jobs.push_back(std::async(std::launch::async, [&u0, &a, &cfg, eps, t_end] {
            MollifyRun run;
            run.eps = eps;
            run.datum = mollify(u0, eps);
            auto [sol, rep] = global_solve(run.datum, a, t_end, cfg);
            run.solution = std::move(sol);
            run.report = std::move(rep);
            return run;
        }));
    }
    MollifyReport out;
    for (auto& j : jobs) {
        out.runs.push_back(j.get());
    }
    const std::size_t n = out.runs.size();
    out.distances.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = space_time_l2_distance(out.runs[i].solution.u, out.runs[j].solution.u, 0.25 * t_end, t_end);
            out.distances[i][j] = out.distances[j][i] = d;
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        out.consecutive.push_back(out.distances[i][i + 1]);
    }
    for (std::size_t i = 1; i < out.consecutive.size(); ++i) {
        out.cauchy_monotone = out.cauchy_monotone && out.consecutive[i] < out.consecutive[i - 1];
    }
    out.hull = {kInfinity, -kInfinity};
    const double bound = u0.sup_norm();
    for (const auto& run : out.runs) {
        out.sup_excess = std::max(out.sup_excess, run.solution.u.sup_norm() - bound);
        const Interval h = essential_range(run.solution.u, 1);
        out.hull.lo = std::min(out.hull.lo, h.lo);
        out.hull.hi = std::max(out.hull.hi, h.hi);
    }
    return out;
}

} // namespace qlp
