#include "qlp/time_grid.hpp"

#include "qlp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qlp {

std::vector<double> uniform_times(double horizon, int steps) {
    if (!(horizon > 0.0) || steps <= 0) {
        throw Error("uniform time grid needs T > 0 and at least one step");
    }
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) {
        t[k] = horizon * k / steps;
    }
    t.back() = horizon;
    return t;
}

std::vector<double> geometric_times(double horizon, double sigma, int steps) {
    if (!(horizon > 0.0) || !(sigma > 0.0 && sigma < 1.0) || steps <= 0) {
        throw Error("geometric time grid needs T > 0, sigma in (0,1) and at least one step");
    }
    std::vector<double> t{0.0};
    for (int k = 0; k <= steps; ++k) {
        t.push_back(horizon * std::pow(sigma, steps - k));
    }
    t.back() = horizon;
    return t;
}

std::vector<double> graded_times(double horizon, double max_step, double first_step, double growth) {
    if (!(horizon > 0.0) || !(max_step > 0.0) || !(first_step > 0.0) || !(growth >= 1.0)) {
        throw Error("graded time grid needs positive horizon and steps, growth >= 1");
    }
    std::vector<double> t{0.0};
    double dt = std::min(first_step, max_step);
    while (t.back() < horizon) {
        const double remaining = horizon - t.back();
        if (remaining <= dt * 1.5) {
            // Merge a short tail into one step; split a long one in two.
            if (remaining > dt) {
                t.push_back(t.back() + 0.5 * remaining);
            }
            t.push_back(horizon);
            break;
        }
        t.push_back(t.back() + dt);
        dt = std::min(dt * growth, max_step);
    }
    t.back() = horizon;
    return t;
}

} // namespace qlp
