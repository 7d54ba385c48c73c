#pragma once

#include <vector>

namespace elastic2d {

/// J_n(x) for n = 0..n_max, x > 0, by Miller's backward recurrence.
std::vector<double> bessel_j_sequence(int n_max, double x);
/// Y_n(x) for n = 0..n_max, x > 0, by forward recurrence from Y_0, Y_1.
std::vector<double> bessel_y_sequence(int n_max, double x);

}  // namespace elastic2d
