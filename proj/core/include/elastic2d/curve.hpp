#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "elastic2d/grid.hpp"

namespace elastic2d {

/// Parametric curve c(s), s in [0, 1], with an arc-length lookup table.
class BoundaryCurve {
 public:
  using Fn = std::function<Point(double)>;

  BoundaryCurve() = default;
  explicit BoundaryCurve(Fn fn, int table_size = 2048);

  static BoundaryCurve segment(Point a, Point b);
  /// Circular arc, angles in radians, traversed from theta0 to theta1.
  static BoundaryCurve arc(Point centre, double radius, double theta0, double theta1);
  /// Graph y = f(x) of the natural cubic spline through (xs, ys), traversed
  /// for x from x0 to x1 (x0 > x1 walks right to left).
  static BoundaryCurve spline_graph(std::vector<double> xs, std::vector<double> ys, double x0, double x1);
  /// Closed polygon parametrized by normalized arc length.
  static BoundaryCurve polygon(std::vector<Point> vertices);

  Point operator()(double s) const { return fn_(s); }
  double length() const noexcept { return length_; }
  bool closed() const;
  /// Parameter at which the arc length from c(0) equals fraction * length.
  double param_at_fraction(double fraction) const;
  /// Distance from p to the curve (piecewise-linear table approximation
  /// refined on the nearest table segment).
  double distance(Point p) const;
  /// n points at uniform parameter spacing, endpoints included.
  std::vector<Point> sample(int n) const;

 private:
  Fn fn_;
  double length_ = 0.0;
  std::vector<double> s_;    // table parameters
  std::vector<double> arc_;  // cumulative arc length
  std::vector<Point> pts_;
};

/// Natural cubic spline y(x); x strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> xs, std::vector<double> ys);
  double operator()(double x) const;
  double derivative(double x) const;
  double min_x() const { return xs_.front(); }
  double max_x() const { return xs_.back(); }

 private:
  std::size_t interval(double x) const;
  std::vector<double> xs_, ys_, m_;  // m_: second derivatives at knots
};

}  // namespace elastic2d
