#include "elastic2d/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elastic2d/error.hpp"

namespace elastic2d {

namespace {

double nu_from_speeds(double cp2, double cs2) {
  return (cp2 - 2.0 * cs2) / (2.0 * (cp2 - cs2));
}

}  // namespace

Material::Material(double rho, double lambda, double mu)
    : rho_(rho), lambda_(lambda), mu_(mu) {
  if (!(rho > 0.0)) throw InvalidArgument("material density must be positive");
  if (!(mu >= 0.0)) throw InvalidArgument("shear modulus must be non-negative");
  const double cp2 = (lambda + 2.0 * mu) / rho;
  const double cs2 = mu / rho;
  if (!(cp2 > cs2)) throw InvalidArgument("material requires cp > cs");
  const double nu = nu_from_speeds(cp2, cs2);
  if (!(nu > -1.0 && nu < 0.5)) {
    std::ostringstream os;
    os << "Poisson ratio " << nu << " outside (-1, 0.5)";
    throw InvalidArgument(os.str());
  }
}

double Material::cp() const noexcept { return std::sqrt(p_modulus() / rho_); }

double Material::cs() const noexcept { return std::sqrt(mu_ / rho_); }

double Material::poisson_ratio() const noexcept {
  return nu_from_speeds(p_modulus() / rho_, mu_ / rho_);
}

Material material_from_speeds(double cp, double cs, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("material density must be positive");
  if (!(cs >= 0.0) || !(cp > cs)) throw InvalidArgument("material requires cp > cs >= 0");
  const double mu = rho * cs * cs;
  const double lambda = rho * (cp * cp - 2.0 * cs * cs);
  return Material(rho, lambda, mu);
}

double shortest_wavelength(const Material& material, double f_max) {
  if (!(f_max > 0.0)) throw InvalidArgument("f_max must be positive");
  const double cs = material.cs();
  const double c = cs > 0.0 ? std::min(material.cp(), cs) : material.cp();
  return c / f_max;
}

double spacing_for_ppw(double wavelength, double ppw) {
  if (!(wavelength > 0.0)) throw InvalidArgument("wavelength must be positive");
  if (!(ppw >= 2.0)) throw InvalidArgument("ppw below 2 violates the Nyquist limit");
  return wavelength / ppw;
}

}  // namespace elastic2d
