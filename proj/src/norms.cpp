#include "qlp/norms.hpp"

#include "qlp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qlp {

std::vector<double> ball_average(const Grid& grid, std::span<const double> g, double radius, bool* saturated) {
    const int n = grid.cells_per_axis();
    const double h = grid.spacing();
    std::vector<double> out(grid.size());
    if (radius >= 0.5 * grid.box_length()) {
        if (saturated != nullptr) {
            *saturated = true;
        }
        double s = 0.0;
        for (double v : g) {
            s += v;
        }
        std::fill(out.begin(), out.end(), s / static_cast<double>(g.size()));
        return out;
    }
    const int r_cells = std::min(static_cast<int>(std::floor(radius / h + 1e-12)), (n - 1) / 2);

    if (grid.dim() == 1) {
        // Circular prefix sums.
        std::vector<double> pre(3 * static_cast<std::size_t>(n) + 1, 0.0);
        for (int i = 0; i < 3 * n; ++i) {
            pre[i + 1] = pre[i] + g[i % n];
        }
        const double count = 2.0 * r_cells + 1.0;
        for (int i = 0; i < n; ++i) {
            const int lo = i - r_cells + n;
            out[i] = (pre[lo + 2 * r_cells + 1] - pre[lo]) / count;
        }
        return out;
    }

    // 2-D: row prefix sums, disc assembled from horizontal chords.
    // Rows cover three periods so every chord [i - w, i + w] is contiguous.
    const std::size_t stride = 3 * static_cast<std::size_t>(n) + 1;
    std::vector<double> pre(static_cast<std::size_t>(n) * stride, 0.0);
    for (int j = 0; j < n; ++j) {
        double* row = &pre[static_cast<std::size_t>(j) * stride];
        for (int i = 0; i < 3 * n; ++i) {
            row[i + 1] = row[i] + g[grid.index(i, j)];
        }
    }
    std::vector<int> half(2 * static_cast<std::size_t>(r_cells) + 1);
    double count = 0.0;
    for (int dy = -r_cells; dy <= r_cells; ++dy) {
        const double rem = radius * radius - (dy * h) * (dy * h);
        int w = rem > 0.0 ? static_cast<int>(std::floor(std::sqrt(rem) / h + 1e-12)) : 0;
        w = std::min(w, (n - 1) / 2);
        half[dy + r_cells] = w;
        count += 2.0 * w + 1.0;
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int dy = -r_cells; dy <= r_cells; ++dy) {
                const int w = half[dy + r_cells];
                const double* row = &pre[static_cast<std::size_t>(grid.wrap(j + dy)) * stride];
                const int lo = i - w + n;
                s += row[lo + 2 * w + 1] - row[lo];
            }
            out[grid.index(i, j)] = s / count;
        }
    }
    return out;
}

ZNormResult z_norm(const SpaceTimeField& f, const ZNormOptions& opts) {
    if (!(opts.q > 1.0)) {
        throw Error("z_norm needs q > 1");
    }
    if (f.empty()) {
        throw Error("z_norm of an empty field");
    }
    const Grid& grid = f.grid();
    const auto times = f.times();
    const bool q_inf = std::isinf(opts.q);

    std::vector<double> samples = opts.t_samples;
    if (samples.empty()) {
        for (double t : times) {
            if (t > 0.0 && t <= opts.horizon * (1.0 + 1e-12)) {
                samples.push_back(t);
            }
        }
    }

    // g_k(y) = |s^{1/2} f_k(y)|^q  (or s^{1/2}|f| for q = inf)
    std::vector<std::vector<double>> weighted(f.frame_count());
    for (std::size_t k = 0; k < f.frame_count(); ++k) {
        const double w = std::sqrt(times[k]);
        weighted[k].resize(grid.size());
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const double v = w * f.magnitude(k, c);
            weighted[k][c] = q_inf ? v : std::pow(v, opts.q);
        }
    }
    auto interpolate = [&](double s) {
        std::vector<double> out(grid.size());
        if (s <= times.front()) {
            return weighted.front();
        }
        if (s >= times.back()) {
            return weighted.back();
        }
        const auto it = std::upper_bound(times.begin(), times.end(), s);
        const std::size_t k = static_cast<std::size_t>(it - times.begin());
        const double a = (s - times[k - 1]) / (times[k] - times[k - 1]);
        for (std::size_t c = 0; c < grid.size(); ++c) {
            out[c] = (1.0 - a) * weighted[k - 1][c] + a * weighted[k][c];
        }
        return out;
    };

    ZNormResult r;
    for (double t : samples) {
        std::vector<std::size_t> inside;
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (times[k] > 0.5 * t && times[k] <= t * (1.0 + 1e-12)) {
                inside.push_back(k);
            }
        }
        if (inside.size() < 2) {
            ++r.skipped;
            continue;
        }
        ++r.evaluated;
        if (q_inf) {
            for (std::size_t k : inside) {
                for (std::size_t c = 0; c < grid.size(); ++c) {
                    if (weighted[k][c] > r.value) {
                        r.value = weighted[k][c];
                        r.argmax_t = t;
                        r.argmax_cell = c;
                    }
                }
            }
            continue;
        }
        // Trapezoid over [t/2, t] on nodes {t/2, inside..., t}.
        std::vector<double> node_t{0.5 * t};
        std::vector<std::vector<double>> node_g{interpolate(0.5 * t)};
        for (std::size_t k : inside) {
            node_t.push_back(times[k]);
            node_g.push_back(weighted[k]);
        }
        if (node_t.back() < t * (1.0 - 1e-12)) {
            node_t.push_back(t);
            node_g.push_back(interpolate(t));
        }
        std::vector<double> h(grid.size(), 0.0);
        for (std::size_t i = 0; i + 1 < node_t.size(); ++i) {
            const double w = 0.5 * (node_t[i + 1] - node_t[i]) / (0.5 * t);
            for (std::size_t c = 0; c < grid.size(); ++c) {
                h[c] += w * (node_g[i][c] + node_g[i + 1][c]);
            }
        }
        bool sat = false;
        const auto avg = ball_average(grid, h, std::sqrt(t), &sat);
        r.saturated = r.saturated || sat;
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const double v = std::pow(std::max(avg[c], 0.0), 1.0 / opts.q);
            if (v > r.value) {
                r.value = v;
                r.argmax_t = t;
                r.argmax_cell = c;
            }
        }
    }
    if (r.evaluated == 0) {
        throw Error("z_norm: no sample time has two frames in (t/2, t]");
    }
    return r;
}

namespace {

double analytic_value(const AnalyticMagnitude& f, int dim, double q, double horizon, std::span<const Point> centres,
                      int t_samples, int nodes) {
    const bool q_inf = std::isinf(q);
    double best = 0.0;
    for (int it = 0; it < t_samples; ++it) {
        const double t = horizon * std::pow(2.0, -static_cast<double>(it) / 4.0);
        const double r = std::sqrt(t);
        for (const Point& x : centres) {
            double acc = 0.0;
            double count = 0.0;
            for (int is = 0; is < nodes; ++is) {
                const double s = 0.5 * t + (is + 0.5) * (0.5 * t) / nodes;
                const double ws = std::sqrt(s);
                const int ny = dim == 2 ? nodes : 1;
                for (int jy = 0; jy < ny; ++jy) {
                    for (int jx = 0; jx < nodes; ++jx) {
                        Point y{x.x - r + (jx + 0.5) * 2.0 * r / nodes,
                                dim == 2 ? x.y - r + (jy + 0.5) * 2.0 * r / nodes : 0.0};
                        if (std::hypot(y.x - x.x, y.y - x.y) >= r) {
                            continue;
                        }
                        const double v = ws * f(s, y);
                        if (q_inf) {
                            acc = std::max(acc, v);
                        } else {
                            acc += std::pow(v, q);
                        }
                        count += 1.0;
                    }
                }
            }
            const double value = q_inf ? acc : std::pow(acc / count, 1.0 / q);
            best = std::max(best, value);
        }
    }
    return best;
}

} // namespace

AnalyticZNorm z_norm_analytic(const AnalyticMagnitude& f, int dim, double q, double horizon,
                              std::span<const Point> centres, int t_samples, int nodes) {
    AnalyticZNorm out;
    out.value = analytic_value(f, dim, q, horizon, centres, t_samples, 2 * nodes);
    const double coarse = analytic_value(f, dim, q, horizon, centres, t_samples, nodes);
    out.richardson_gap = std::abs(out.value - coarse);
    return out;
}

double weighted_sup_norm(const SpaceTimeField& f, double beta, double horizon) {
    double m = 0.0;
    for (std::size_t k = 0; k < f.frame_count(); ++k) {
        const double t = f.time(k);
        if (t > horizon * (1.0 + 1e-12) || (t == 0.0 && beta > 0.0)) {
            continue;
        }
        const double w = std::pow(t, -beta);
        for (std::size_t c = 0; c < f.grid().size(); ++c) {
            m = std::max(m, w * f.magnitude(k, c));
        }
    }
    return m;
}

NonInclusionWitness z_l2_noninclusion_witness(double horizon, int dim) {
    NonInclusionWitness w;
    auto indicator = [](double s, Point y) { return std::hypot(y.x, y.y) < 1.0 ? 1.0 / std::sqrt(s) : 0.0; };
    const std::vector<Point> centres{{0.0, 0.0}, {0.5, 0.0}, {0.9, 0.0}};
    for (double q : {1.5, 2.0, 4.0, kInfinity}) {
        const auto z = z_norm_analytic(indicator, dim, q, std::min(horizon, 1.0), centres, 16, 16);
        w.z_values.emplace_back(q, z.value);
    }
    w.z_ok = std::all_of(w.z_values.begin(), w.z_values.end(),
                         [](const auto& p) { return std::abs(p.second - 1.0) <= 1e-6; });

    // |B| by midpoint counting on a fine lattice.
    const int m = 2000;
    double measure = 0.0;
    if (dim == 1) {
        measure = 2.0;
    } else {
        const double h = 2.0 / m;
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                if (std::hypot(-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h) < 1.0) {
                    measure += h * h;
                }
            }
        }
    }
    w.ball_measure = measure;

    // int_eps^T s^{-1} ds by composite Simpson on dyadic blocks.
    auto time_integral = [](double a, double b) {
        double total = 0.0;
        while (b > a * (1.0 + 1e-15)) {
            const double lo = std::max(a, 0.5 * b);
            const int n = 64;
            const double h = (b - lo) / n;
            double s = 1.0 / lo + 1.0 / b;
            for (int i = 1; i < n; ++i) {
                s += (i % 2 == 1 ? 4.0 : 2.0) / (lo + i * h);
            }
            total += s * h / 3.0;
            b = lo;
        }
        return total;
    };
    for (int k = 4; k <= 14; ++k) {
        const double eps = std::pow(2.0, -k);
        w.epsilons.push_back(eps);
        w.integrals.push_back(measure * time_integral(eps, horizon));
    }
    // Least-squares slope of integral against log(1/eps).
    const std::size_t n = w.epsilons.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(1.0 / w.epsilons[i]);
        sx += x;
        sy += w.integrals[i];
        sxx += x * x;
        sxy += x * w.integrals[i];
    }
    w.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double reference = dim == 1 ? 2.0 : std::numbers::pi;
    w.slope_ok = std::abs(w.fitted_slope - reference) <= 0.05 * reference;
    return w;
}

CarlesonReport carleson(const SpaceTimeField& gradient, double u_norm, int max_t_samples) {
    const Grid& grid = gradient.grid();
    CarlesonReport r;
    const std::size_t m = gradient.frame_count();
    if (m < 2) {
        return r;
    }
    // Evaluate at (roughly) geometrically spread frame indices.
    std::vector<std::size_t> eval;
    const std::size_t stride = std::max<std::size_t>(1, (m - 1) / static_cast<std::size_t>(std::max(1, max_t_samples)));
    for (std::size_t k = m - 1; k >= 1; k = k > stride ? k - stride : 0) {
        eval.push_back(k);
        if (k <= stride) {
            break;
        }
    }
    std::sort(eval.begin(), eval.end());

    std::vector<double> accum(grid.size(), 0.0);
    std::size_t next = 0;
    for (std::size_t k = 1; k < m && next < eval.size(); ++k) {
        const double dt = gradient.time(k) - gradient.time(k - 1);
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const double g = gradient.magnitude(k, c);
            accum[c] += dt * g * g;
        }
        if (k != eval[next]) {
            continue;
        }
        ++next;
        const double t = gradient.time(k);
        bool sat = false;
        const auto avg = ball_average(grid, accum, std::sqrt(t), &sat);
        r.saturated = r.saturated || sat;
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const double v = std::sqrt(std::max(avg[c], 0.0));
            if (v > r.value) {
                r.value = v;
                r.argmax_t = t;
                r.argmax_cell = c;
            }
        }
    }
    r.bound_ratio = u_norm > 0.0 ? r.value / u_norm : 0.0;
    return r;
}

double upper_parabolic_conjugate(double p, int n) {
    if (!(p > 1.0 && p < n + 2.0)) {
        throw Error("upper parabolic conjugate needs 1 < p < n + 2");
    }
    return 1.0 / (1.0 / p - 1.0 / (n + 2.0));
}

double lower_parabolic_conjugate(double q, int n) {
    if (!(q > 1.0)) {
        throw Error("lower parabolic conjugate needs q > 1");
    }
    return 1.0 / (1.0 / q + 1.0 / (n + 2.0));
}

} // namespace qlp
