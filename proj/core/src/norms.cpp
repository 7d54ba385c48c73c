#include "elastic2d/norms.hpp"

#include <algorithm>
#include <cmath>

#include "elastic2d/error.hpp"

namespace elastic2d {

namespace {

void accumulate(std::span<const double> n, std::span<const double> r, double& diff, double& ref) {
  if (n.size() != r.size()) throw InvalidArgument("fields have different sizes");
  for (std::size_t k = 0; k < n.size(); ++k) {
    diff = std::max(diff, std::abs(n[k] - r[k]));
    ref = std::max(ref, std::abs(r[k]));
  }
}

}  // namespace

double relative_max_error(std::span<const double> numeric, std::span<const double> reference) {
  double diff = 0.0, ref = 0.0;
  accumulate(numeric, reference, diff, ref);
  if (!(ref > 0.0)) throw InvalidArgument("reference field is identically zero");
  return diff / ref;
}

double relative_max_error(std::span<const double> nu, std::span<const double> nv, std::span<const double> ru,
                          std::span<const double> rv) {
  double diff = 0.0, ref = 0.0;
  accumulate(nu, ru, diff, ref);
  accumulate(nv, rv, diff, ref);
  if (!(ref > 0.0)) throw InvalidArgument("reference field is identically zero");
  return diff / ref;
}

ConvergenceOrders convergence_order(double e_h, double e_h2, double e_h4) {
  if (!(e_h > 0.0) || !(e_h2 > 0.0) || !(e_h4 > 0.0)) throw InvalidArgument("errors must be positive");
  ConvergenceOrders o;
  o.coarse = std::log2(e_h / e_h2);
  o.fine = std::log2(e_h2 / e_h4);
  o.monotone = e_h > e_h2 && e_h2 > e_h4;
  return o;
}

}  // namespace elastic2d
