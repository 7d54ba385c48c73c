#include "elastic2d/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace elastic2d {

ManufacturedSolution::ManufacturedSolution(const Material& material, const Frequencies& f)
    : material_(material), f_(f) {}

double ManufacturedSolution::time_factor(double t, int k) const {
  return std::pow(f_.w, k) * std::cos(f_.w * t + k * std::numbers::pi / 2.0);
}

Point ManufacturedSolution::displacement(double x, double y, double t, int tderiv) const {
  const double s = time_factor(t, tderiv);
  return {s * f_.amp_u * std::sin(f_.a * x + f_.b * y + f_.p), s * f_.amp_v * std::cos(f_.c * x - f_.d * y + f_.q)};
}

Stress ManufacturedSolution::stress(double x, double y, double t, int tderiv) const {
  const double s = time_factor(t, tderiv);
  const double P = f_.a * x + f_.b * y + f_.p, Q = f_.c * x - f_.d * y + f_.q;
  const double ux = f_.amp_u * f_.a * std::cos(P), uy = f_.amp_u * f_.b * std::cos(P);
  const double vx = -f_.amp_v * f_.c * std::sin(Q), vy = f_.amp_v * f_.d * std::sin(Q);
  const double L = material_.lambda(), M = material_.mu();
  return {s * ((L + 2 * M) * ux + L * vy), s * (L * ux + (L + 2 * M) * vy), s * M * (uy + vx)};
}

Point ManufacturedSolution::force(double x, double y, double t, int tderiv) const {
  const double P = f_.a * x + f_.b * y + f_.p, Q = f_.c * x - f_.d * y + f_.q;
  const double L = material_.lambda(), M = material_.mu(), r = material_.rho();
  const double sp = f_.amp_u * std::sin(P), cq = f_.amp_v * std::cos(Q);
  const double a = f_.a, b = f_.b, c = f_.c, d = f_.d;
  const double divx = -(L + 2 * M) * a * a * sp + L * c * d * cq - M * b * b * sp + M * c * d * cq;
  const double divy = -M * a * b * sp - M * c * c * cq - L * a * b * sp - (L + 2 * M) * d * d * cq;
  // rho u_tt carries the time factor of order tderiv + 2.
  const double s = time_factor(t, tderiv), s2 = time_factor(t, tderiv + 2);
  return {r * s2 * sp - s * divx, r * s2 * cq - s * divy};
}

Point ManufacturedSolution::traction(double x, double y, double t, Point n, int tderiv) const {
  const Stress s = stress(x, y, t, tderiv);
  return {s.xx * n.x + s.xy * n.y, s.xy * n.x + s.yy * n.y};
}

ManufacturedSolution mms_pair(const Material& material, const ManufacturedSolution::Frequencies& f) {
  return ManufacturedSolution(material, f);
}

}  // namespace elastic2d
