#pragma once

#include <array>

#include "elastic2d/grid.hpp"
#include "elastic2d/material.hpp"

namespace elastic2d {

struct Stress {
  double xx = 0.0, yy = 0.0, xy = 0.0;
};

/// u = A sin(a x + b y + p) cos(w t), v = B cos(c x - d y + q) cos(w t)
/// with body force f = rho u_tt - div sigma(u).
class ManufacturedSolution {
 public:
  struct Frequencies {
    double a = 1.3, b = 0.7, c = 0.9, d = 1.1, w = 2.0;
    double p = 0.2, q = -0.4;
    double amp_u = 1.0, amp_v = 1.0;
  };

  ManufacturedSolution(const Material& material, const Frequencies& f);

  const Material& material() const noexcept { return material_; }
  const Frequencies& frequencies() const noexcept { return f_; }

  /// `tderiv` selects a time derivative (any order).
  Point displacement(double x, double y, double t, int tderiv = 0) const;
  Point velocity(double x, double y, double t) const { return displacement(x, y, t, 1); }
  Stress stress(double x, double y, double t, int tderiv = 0) const;
  Point force(double x, double y, double t, int tderiv = 0) const;
  /// sigma n.
  Point traction(double x, double y, double t, Point normal, int tderiv = 0) const;

 private:
  double time_factor(double t, int k) const;
  Material material_;
  Frequencies f_;
};

/// The standard pair used by the convergence studies.
ManufacturedSolution mms_pair(const Material& material, const ManufacturedSolution::Frequencies& f = {});

}  // namespace elastic2d
