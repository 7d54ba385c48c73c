#pragma once

#include <array>
#include <complex>
#include <vector>

#include "elastic2d/grid.hpp"
#include "elastic2d/material.hpp"

namespace elastic2d {

/// Plane P-wave travelling in +x hitting a traction-free circular cavity.
struct CavityScatterParams {
  Point centre{0.0, 0.0};
  double radius = 1.0;
  double p_wavelength = 0.25;
  double s_wavelength = 0.125;
  double period = 0.25;
  double rho = 1.0;
  /// Zero selects the smallest count whose trailing coefficients are below
  /// 1e-12 of the largest (capped at 200).
  int n_modes = 0;

  Material material() const;
  void validate() const;
};

/// Time-harmonic solution Re(U(x) exp(-i w t)); the incident wave has unit
/// displacement amplitude, u_x = cos(k_p x - w t) at the cavity centre line.
class CavityScatter {
 public:
  using Complex = std::complex<double>;

  explicit CavityScatter(const CavityScatterParams& params);

  const CavityScatterParams& params() const noexcept { return params_; }
  int modes() const noexcept { return static_cast<int>(a_.size()); }
  double omega() const noexcept { return omega_; }
  double kp() const noexcept { return kp_; }
  double ks() const noexcept { return ks_; }

  /// Complex spatial amplitude U = (U_x, U_y). Throws for points inside the
  /// cavity.
  std::array<Complex, 2> amplitude(double x, double y) const;
  /// Displacement at time t; `tderiv` selects a time derivative.
  Point displacement(double x, double y, double t, int tderiv = 0) const;
  static Point evaluate(const std::array<Complex, 2>& amp, double omega, double t, int tderiv = 0);

  /// Modal coefficients of the scattered P and S potentials.
  const std::vector<Complex>& p_coefficients() const noexcept { return a_; }
  const std::vector<Complex>& s_coefficients() const noexcept { return b_; }

 private:
  CavityScatterParams params_;
  double omega_ = 0.0, kp_ = 0.0, ks_ = 0.0, lambda_ = 0.0, mu_ = 0.0;
  std::vector<Complex> a_, b_;
};

}  // namespace elastic2d
