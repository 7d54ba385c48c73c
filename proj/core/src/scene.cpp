#include "elastic2d/scene.hpp"

#include <algorithm>
#include <cmath>

#include "elastic2d/curve.hpp"
#include "elastic2d/error.hpp"

namespace elastic2d {

InterfaceCurve::InterfaceCurve(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)), spline_(xs_, ys_) {}

void SceneGeometry::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min)) throw InvalidArgument("scene box is empty");
  if (materials.empty()) throw InvalidArgument("scene needs at least one material");
  if (interface && materials.size() < 2) throw InvalidArgument("a material interface needs two materials");
  for (const auto& c : cavities) {
    if (!(c.radius > 0.0)) throw InvalidArgument("cavity radius must be positive");
    if (c.centre.x - c.radius <= x_min || c.centre.x + c.radius >= x_max || c.centre.y - c.radius <= y_min ||
        c.centre.y + c.radius >= y_max) {
      throw InvalidArgument("cavity touches or exceeds the scene box");
    }
  }
  for (std::size_t i = 0; i < cavities.size(); ++i)
    for (std::size_t j = i + 1; j < cavities.size(); ++j) {
      const double d = std::hypot(cavities[i].centre.x - cavities[j].centre.x, cavities[i].centre.y - cavities[j].centre.y);
      if (d <= cavities[i].radius + cavities[j].radius) throw InvalidArgument("cavities intersect");
    }
  if (interface) {
    if (interface->xs().size() < 2)
      throw InvalidArgument("interface needs at least two control points");
    if (interface->xs().front() > x_min || interface->xs().back() < x_max)
      throw InvalidArgument("interface control points must span the scene box in x");
  }
}

bool SceneGeometry::in_cavity(Point p) const {
  for (const auto& c : cavities) {
    const double dx = p.x - c.centre.x, dy = p.y - c.centre.y;
    if (dx * dx + dy * dy < c.radius * c.radius) return true;
  }
  return false;
}

double SceneGeometry::interface_y(double x) const {
  if (!interface) throw InvalidArgument("scene has no interface");
  // Constant extension beyond the control points.
  const auto& xs = interface->xs();
  return (*interface)(std::clamp(x, xs.front(), xs.back()));
}

int SceneGeometry::region(Point p) const {
  if (!interface) return 0;
  return p.y >= interface_y(p.x) ? 0 : 1;
}

double SceneGeometry::min_wave_speed() const {
  double c = 1e300;
  for (const auto& m : materials) c = std::min(c, m.cs() > 0.0 ? m.cs() : m.cp());
  return c;
}

double SceneGeometry::max_p_speed() const {
  double c = 0.0;
  for (const auto& m : materials) c = std::max(c, m.cp());
  return c;
}

}  // namespace elastic2d
