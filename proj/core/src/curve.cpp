#include "elastic2d/curve.hpp"

#include <algorithm>
#include <cmath>

#include "elastic2d/error.hpp"

namespace elastic2d {

namespace {

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

BoundaryCurve::BoundaryCurve(Fn fn, int table_size) : fn_(std::move(fn)) {
  if (table_size < 2) throw InvalidArgument("curve table needs at least 2 entries");
  const auto n = static_cast<std::size_t>(table_size);
  s_.resize(n);
  arc_.resize(n);
  pts_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s_[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    pts_[i] = fn_(s_[i]);
  }
  arc_[0] = 0.0;
  // Simpson on each table interval with a midpoint sample.
  for (std::size_t i = 1; i < n; ++i) {
    const Point m = fn_(0.5 * (s_[i - 1] + s_[i]));
    const Point q1 = fn_(s_[i - 1] + 0.25 * (s_[i] - s_[i - 1]));
    const Point q3 = fn_(s_[i - 1] + 0.75 * (s_[i] - s_[i - 1]));
    const double chord = dist(pts_[i - 1], q1) + dist(q1, m) + dist(m, q3) + dist(q3, pts_[i]);
    const double coarse = dist(pts_[i - 1], m) + dist(m, pts_[i]);
    arc_[i] = arc_[i - 1] + chord + (chord - coarse) / 15.0;
  }
  length_ = arc_.back();
  if (!(length_ > 0.0)) throw InvalidArgument("degenerate curve of zero length");
}

BoundaryCurve BoundaryCurve::segment(Point a, Point b) {
  return BoundaryCurve([a, b](double s) { return Point{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)}; }, 16);
}

BoundaryCurve BoundaryCurve::arc(Point c, double r, double t0, double t1) {
  if (!(r > 0.0)) throw InvalidArgument("arc radius must be positive");
  return BoundaryCurve([c, r, t0, t1](double s) {
    const double t = t0 + s * (t1 - t0);
    return Point{c.x + r * std::cos(t), c.y + r * std::sin(t)};
  });
}

BoundaryCurve BoundaryCurve::spline_graph(std::vector<double> xs, std::vector<double> ys, double x0, double x1) {
  auto sp = std::make_shared<CubicSpline>(std::move(xs), std::move(ys));
  return BoundaryCurve([sp, x0, x1](double s) {
    const double x = s == 1.0 ? x1 : x0 + s * (x1 - x0);
    return Point{x, (*sp)(x)};
  });
}

BoundaryCurve BoundaryCurve::polygon(std::vector<Point> v) {
  if (v.size() < 3) throw InvalidArgument("polygon needs at least 3 vertices");
  std::vector<double> cum(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) cum[i + 1] = cum[i] + dist(v[i], v[(i + 1) % v.size()]);
  const double total = cum.back();
  auto verts = std::make_shared<std::vector<Point>>(std::move(v));
  auto c = std::make_shared<std::vector<double>>(std::move(cum));
  return BoundaryCurve(
      [verts, c, total](double s) {
        const double l = std::clamp(s, 0.0, 1.0) * total;
        std::size_t k = static_cast<std::size_t>(std::upper_bound(c->begin(), c->end(), l) - c->begin());
        k = std::clamp<std::size_t>(k, 1, verts->size()) - 1;
        const Point a = (*verts)[k];
        const Point b = (*verts)[(k + 1) % verts->size()];
        const double seg = (*c)[k + 1] - (*c)[k];
        const double f = seg > 0.0 ? (l - (*c)[k]) / seg : 0.0;
        return Point{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
      },
      static_cast<int>(8 * verts->size() + 1));
}

bool BoundaryCurve::closed() const { return dist(pts_.front(), pts_.back()) <= 1e-12 * std::max(1.0, length_); }

double BoundaryCurve::param_at_fraction(double fraction) const {
  const double target = std::clamp(fraction, 0.0, 1.0) * length_;
  auto it = std::lower_bound(arc_.begin(), arc_.end(), target);
  if (it == arc_.begin()) return 0.0;
  if (it == arc_.end()) return 1.0;
  const auto k = static_cast<std::size_t>(it - arc_.begin());
  const double f = (target - arc_[k - 1]) / (arc_[k] - arc_[k - 1]);
  return s_[k - 1] + f * (s_[k] - s_[k - 1]);
}

double BoundaryCurve::distance(Point p) const {
  double best = 1e300;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k + 1 < pts_.size(); ++k) {
    const Point a = pts_[k];
    const Point b = pts_[k + 1];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double l2 = dx * dx + dy * dy;
    const double f = l2 > 0.0 ? std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / l2, 0.0, 1.0) : 0.0;
    const double d = std::hypot(p.x - a.x - f * dx, p.y - a.y - f * dy);
    if (d < best) {
      best = d;
      best_k = k;
    }
  }
  // Golden-section refinement on the true curve around the nearest segment.
  double lo = s_[best_k > 0 ? best_k - 1 : 0];
  double hi = s_[std::min(best_k + 2, s_.size() - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double s) { return dist(fn_(s), p); };
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int it = 0; it < 60; ++it) {
    if (fa < fb) {
      hi = b; b = a; fb = fa; a = hi - g * (hi - lo); fa = f(a);
    } else {
      lo = a; a = b; fa = fb; b = lo + g * (hi - lo); fb = f(b);
    }
  }
  return std::min(best, std::min(fa, fb));
}

std::vector<Point> BoundaryCurve::sample(int n) const {
  if (n < 2) throw InvalidArgument("curve sampling needs at least 2 points");
  std::vector<Point> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn_(static_cast<double>(i) / (n - 1));
  return out;
}

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
  const std::size_t n = xs_.size();
  if (n < 2 || ys_.size() != n) throw InvalidArgument("spline needs matching x/y arrays of length >= 2");
  for (std::size_t i = 1; i < n; ++i)
    if (!(xs_[i] > xs_[i - 1])) throw InvalidArgument("spline knots must be strictly increasing");
  m_.assign(n, 0.0);
  if (n < 3) return;
  // Tridiagonal system for interior second derivatives (Thomas algorithm).
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = xs_[i] - xs_[i - 1], h1 = xs_[i + 1] - xs_[i];
    diag[i] = (h0 + h1) / 3.0;
    upper[i] = h1 / 6.0;
    rhs[i] = (ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0;
    if (i > 1) {
      const double l = (h0 / 6.0) / diag[i - 1];
      diag[i] -= l * upper[i - 1];
      rhs[i] -= l * rhs[i - 1];
    }
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
    if (i == 1) break;
  }
}

std::size_t CubicSpline::interval(double x) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  auto k = static_cast<std::size_t>(it - xs_.begin());
  return std::clamp<std::size_t>(k, 1, xs_.size() - 1) - 1;
}

double CubicSpline::operator()(double x) const {
  const std::size_t k = interval(x);
  const double h = xs_[k + 1] - xs_[k];
  const double a = (xs_[k + 1] - x) / h, b = (x - xs_[k]) / h;
  return a * ys_[k] + b * ys_[k + 1] + ((a * a * a - a) * m_[k] + (b * b * b - b) * m_[k + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  const std::size_t k = interval(x);
  const double h = xs_[k + 1] - xs_[k];
  const double a = (xs_[k + 1] - x) / h, b = (x - xs_[k]) / h;
  return (ys_[k + 1] - ys_[k]) / h + ((1.0 - 3.0 * a * a) * m_[k] + (3.0 * b * b - 1.0) * m_[k + 1]) * h / 6.0;
}

}  // namespace elastic2d
