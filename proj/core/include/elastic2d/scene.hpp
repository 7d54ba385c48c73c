#pragma once

#include <optional>
#include <vector>

#include "elastic2d/curve.hpp"
#include "elastic2d/grid.hpp"
#include "elastic2d/material.hpp"

namespace elastic2d {

enum class BoundaryKind { TractionFree, Radiation, Dirichlet, Interface };

struct Cavity {
  Point centre;
  double radius = 1.0;
};

/// Material interface y = f(x), f the natural cubic spline through the
/// control points. Material 0 lies above, material 1 below.
class InterfaceCurve {
 public:
  InterfaceCurve(std::vector<double> xs, std::vector<double> ys);
  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& ys() const noexcept { return ys_; }
  double operator()(double x) const { return spline_(x); }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  CubicSpline spline_;
};

/// Geometry and materials of a scene, independent of the discretization.
struct SceneGeometry {
  double x_min = -1.0, x_max = 1.0, y_min = -1.0, y_max = 1.0;
  std::vector<Cavity> cavities;
  std::optional<InterfaceCurve> interface;
  std::vector<Material> materials{Material()};
  BoundaryKind outer = BoundaryKind::Radiation;
  /// Half width of the square around each cavity that is meshed by four
  /// quarter-ring blocks.
  double cavity_box_half_width = 1.8;

  void validate() const;
  bool in_cavity(Point p) const;
  /// Index into materials for a point outside all cavities.
  int region(Point p) const;
  double interface_y(double x) const;
  const Material& material_at(Point p) const { return materials[static_cast<std::size_t>(region(p))]; }
  /// Smallest shear (or P, for fluids) speed over the materials.
  double min_wave_speed() const;
  double max_p_speed() const;
};

}  // namespace elastic2d
