#pragma once
// Helpers shared by the solver unit tests and the acceptance checks.
#include <cmath>
#include <numbers>

#include "elastic2d/curve.hpp"
#include "elastic2d/mesh.hpp"
#include "elastic2d/sbp_solver.hpp"

namespace checks {

using namespace elastic2d;

// One block: a square of side L rotated by `angle` with gently curved sides,
// so the metric terms vary across the block.
inline MultiblockMesh rotated_block_mesh(int n, double angle, double bulge, BoundaryKind kind, const Material& mat) {
  const double c = std::cos(angle), s = std::sin(angle);
  auto map = [=](double a, double b) { return Point{c * a - s * b, s * a + c * b}; };
  auto side = [=](Point p0, Point p1, double sign) {
    return BoundaryCurve([=](double t) {
      const double a = p0.x + t * (p1.x - p0.x), b = p0.y + t * (p1.y - p0.y);
      const double off = sign * bulge * std::sin(std::numbers::pi * t);
      // bulge along the local normal of the unrotated side
      const double nx = -(p1.y - p0.y), ny = p1.x - p0.x;
      const double len = std::hypot(nx, ny);
      return map(a + off * nx / len, b + off * ny / len);
    });
  };
  CurvilinearBlock b = transfinite_block(side({-1, -1}, {1, -1}, 1.0), side({-1, 1}, {1, 1}, 1.0),
                                         side({-1, -1}, {-1, 1}, -1.0), side({1, -1}, {1, 1}, -1.0), n, n);
  for (auto& t : b.tags) t.kind = kind;
  MultiblockMesh m;
  m.blocks.push_back(std::move(b));
  m.materials = {mat};
  m.validate();
  return m;
}

// max |D_xi(J xi_x) + D_eta(J eta_x)| and the same for y, relative to the
// typical size of J xi_x / h.
inline double metric_freestream(const SbpSolver& solver) {
  double worst = 0.0;
  for (int b = 0; b < solver.block_count(); ++b) {
    const auto& m = solver.metrics(b);
    const int nx = m.J.nx(), ny = m.J.ny();
    Array2D ax(nx, ny), bx(nx, ny), ay(nx, ny), by(nx, ny);
    for (std::size_t k = 0; k < m.J.size(); ++k) {
      ax.data()[k] = m.J.data()[k] * m.xi_x.data()[k];
      bx.data()[k] = m.J.data()[k] * m.eta_x.data()[k];
      ay.data()[k] = m.J.data()[k] * m.xi_y.data()[k];
      by.data()[k] = m.J.data()[k] * m.eta_y.data()[k];
    }
    Array2D rx(nx, ny), ry(nx, ny);
    double scale = 0.0;
    for (int j = 0; j < ny; ++j) {
      solver.ops_xi(b).apply_d1(&ax(0, j), 1, &rx(0, j), 1);
      solver.ops_xi(b).apply_d1(&ay(0, j), 1, &ry(0, j), 1);
    }
    for (int i = 0; i < nx; ++i) {
      solver.ops_eta(b).apply_d1(&bx(i, 0), nx, &rx(i, 0), nx, true);
      solver.ops_eta(b).apply_d1(&by(i, 0), nx, &ry(i, 0), nx, true);
    }
    for (std::size_t k = 0; k < m.J.size(); ++k)
      scale = std::max({scale, std::abs(ax.data()[k]), std::abs(bx.data()[k]), std::abs(ay.data()[k]), std::abs(by.data()[k])});
    worst = std::max(worst, std::max(rx.max_abs(), ry.max_abs()) / scale);
  }
  return worst;
}

// max |M^-1 K u| for a rigid motion u = (a - w y, b + w x), relative to
// c^2 max|u| / h^2, the size of M^-1 K applied to a rough field.
inline double rigid_motion_residual(const SbpSolver& solver, double a, double b, double w) {
  Field u = solver.zero_field(), out = solver.zero_field();
  const auto& mesh = solver.mesh();
  for (int k = 0; k < solver.block_count(); ++k) {
    const auto& blk = mesh.blocks[static_cast<std::size_t>(k)];
    for (std::size_t n = 0; n < blk.X.size(); ++n) {
      u[k].u.data()[n] = a - w * blk.Y[n];
      u[k].v.data()[n] = b + w * blk.X[n];
    }
  }
  solver.homogeneous_acceleration(u, out);
  double worst = 0.0, cmax = 0.0, umax = 0.0;
  for (int k = 0; k < solver.block_count(); ++k) {
    worst = std::max({worst, out[k].u.max_abs(), out[k].v.max_abs()});
    umax = std::max({umax, u[k].u.max_abs(), u[k].v.max_abs()});
    const auto& mat = solver.material(k);
    cmax = std::max(cmax, mat.p_modulus() / mat.rho());
  }
  const double h = mesh.min_spacing();
  return worst / (cmax / (h * h) * umax);
}

}  // namespace checks
