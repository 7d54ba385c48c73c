#pragma once

#include <span>

namespace elastic2d {

/// max|numeric - reference| / max|reference|. Throws on size mismatch or a
/// zero reference.
double relative_max_error(std::span<const double> numeric, std::span<const double> reference);
/// Two-component version: both components share the normalisation.
double relative_max_error(std::span<const double> nu, std::span<const double> nv, std::span<const double> ru,
                          std::span<const double> rv);

struct ConvergenceOrders {
  double coarse = 0.0;  ///< log2(e(h) / e(h/2))
  double fine = 0.0;    ///< log2(e(h/2) / e(h/4))
  bool monotone = true;
};

/// Orders from errors on a grid triple with refinement ratio 2. Non-monotone
/// errors are reported through `monotone`, not hidden.
ConvergenceOrders convergence_order(double e_h, double e_h2, double e_h4);

}  // namespace elastic2d
