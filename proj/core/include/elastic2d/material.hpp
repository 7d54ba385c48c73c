#pragma once

namespace elastic2d {

/// Isotropic linear elastic material. The Lamé triple is canonical; wave
/// speeds and Poisson ratio are derived.
class Material {
 public:
  Material() = default;
  /// Validates rho > 0, mu >= 0, cp > cs and nu in (-1, 0.5).
  Material(double rho, double lambda, double mu);

  double rho() const noexcept { return rho_; }
  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }

  double cp() const noexcept;
  double cs() const noexcept;
  double poisson_ratio() const noexcept;

  /// lambda + 2 mu, the P-wave modulus.
  double p_modulus() const noexcept { return lambda_ + 2.0 * mu_; }

  bool operator==(const Material&) const = default;

 private:
  double rho_ = 1.0;
  double lambda_ = 1.0;
  double mu_ = 1.0;
};

Material material_from_speeds(double cp, double cs, double rho);

/// Shortest wavelength present when the highest significant frequency is
/// f_max. A zero shear speed (fluid) falls back to the P speed.
double shortest_wavelength(const Material& material, double f_max);

/// Grid spacing resolving `wavelength` with `ppw` points per wavelength.
double spacing_for_ppw(double wavelength, double ppw);

}  // namespace elastic2d
