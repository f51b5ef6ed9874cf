#pragma once

#include <vector>

namespace qlp {

/// 0 = t_0 < ... < t_M = T with constant step.
std::vector<double> uniform_times(double horizon, int steps);

/// {0} followed by t_k = T sigma^(M-k), k = 0..M. Early steps resolve
/// sources that are singular at t = 0.
std::vector<double> geometric_times(double horizon, double sigma, int steps);

/// 0, then steps growing geometrically from `first_step` by `growth` until
/// they reach `max_step`, then constant steps; ends exactly at T.
std::vector<double> graded_times(double horizon, double max_step, double first_step, double growth = 1.1);

} // namespace qlp
