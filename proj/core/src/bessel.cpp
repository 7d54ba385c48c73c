#include "elastic2d/bessel.hpp"

#include <algorithm>
#include <cmath>

#include "elastic2d/error.hpp"

namespace elastic2d {

std::vector<double> bessel_j_sequence(int n_max, double x) {
  if (!(x > 0.0) || n_max < 0) throw InvalidArgument("bessel sequence needs x > 0 and n_max >= 0");
  // Start well above both n_max and x so the minimal solution dominates.
  const int start = 2 * ((std::max(n_max, static_cast<int>(x)) + 20 + static_cast<int>(std::sqrt(40.0 * std::max(n_max, static_cast<int>(x))))) / 2);
  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[static_cast<std::size_t>(start) + 1] = 0.0;
  j[static_cast<std::size_t>(start)] = 1e-300;
  double norm = 0.0;
  for (int n = start; n >= 1; --n) {
    j[static_cast<std::size_t>(n) - 1] = 2.0 * n / x * j[static_cast<std::size_t>(n)] - j[static_cast<std::size_t>(n) + 1];
    if (std::abs(j[static_cast<std::size_t>(n) - 1]) > 1e250) {
      for (int k = n - 1; k <= start; ++k) j[static_cast<std::size_t>(k)] *= 1e-250;
      norm *= 1e-250;
    }
    if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * j[static_cast<std::size_t>(n) - 1];
  }
  norm += j[0];
  // J_0 + 2 sum J_2k = 1.
  j.resize(static_cast<std::size_t>(n_max) + 1);
  for (double& v : j) v /= norm;
  return j;
}

std::vector<double> bessel_y_sequence(int n_max, double x) {
  if (!(x > 0.0) || n_max < 0) throw InvalidArgument("bessel sequence needs x > 0 and n_max >= 0");
  std::vector<double> y(static_cast<std::size_t>(n_max) + 1);
  y[0] = std::cyl_neumann(0.0, x);
  if (n_max >= 1) y[1] = std::cyl_neumann(1.0, x);
  for (int n = 1; n < n_max; ++n)
    y[static_cast<std::size_t>(n) + 1] = 2.0 * n / x * y[static_cast<std::size_t>(n)] - y[static_cast<std::size_t>(n) - 1];
  return y;
}

}  // namespace elastic2d
