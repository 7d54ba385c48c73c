#include "elastic2d/svs_solver.hpp"

#include <algorithm>
#include <cmath>

#include "elastic2d/error.hpp"
#include "parallel.hpp"

namespace elastic2d {

double svs_stability_constant() { return (std::abs(kSvsC1) + std::abs(kSvsC2)) * std::sqrt(2.0); }

void PaddedArray::wrap() {
  const int g = kGhost;
  for (int j = 0; j < my_; ++j)
    for (int k = 1; k <= g; ++k) {
      (*this)(-k, j) = (*this)(mx_ - k, j);
      (*this)(mx_ - 1 + k, j) = (*this)(k - 1, j);
    }
  for (int k = 1; k <= g; ++k)
    for (int i = -g; i < mx_ + g; ++i) {
      (*this)(i, -k) = (*this)(i, my_ - k);
      (*this)(i, my_ - 1 + k) = (*this)(i, k - 1);
    }
}

double PaddedArray::max_abs() const {
  double m = 0.0;
  for (int j = 0; j < my_; ++j) {
    const double* r = row(j);
    for (int i = 0; i < mx_; ++i) m = std::max(m, std::abs(r[i]));
  }
  return m;
}

namespace {

struct Sizes {
  int vx_nx, vx_ny, vy_nx, vy_ny, xy_nx, xy_ny;
};

Sizes sizes(const CartesianGrid& g, bool periodic) {
  if (periodic) return {g.nx, g.ny, g.nx, g.ny, g.nx, g.ny};
  return {g.nx - 1, g.ny, g.nx, g.ny - 1, g.nx - 1, g.ny - 1};
}

// Node index with periodic wrap; -1 when outside a bounded grid.
int wrap_index(int i, int n, bool periodic) {
  if (periodic) return ((i % n) + n) % n;
  return (i < 0 || i >= n) ? -1 : i;
}

double harmonic4(double a, double b, double c, double d) {
  if (a <= 0.0 || b <= 0.0 || c <= 0.0 || d <= 0.0) return 0.0;
  return 4.0 / (1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d);
}

}  // namespace

MaterialRaster uniform_raster(const Material& material, const CartesianGrid& grid, bool periodic) {
  SceneGeometry scene;
  scene.x_min = grid.origin.x;
  scene.x_max = grid.x_max() + grid.hx;
  scene.y_min = grid.origin.y;
  scene.y_max = grid.y_max() + grid.hy;
  scene.materials = {material};
  return rasterize_scene(scene, grid, AirProperties{}, periodic);
}

MaterialRaster rasterize_scene(const SceneGeometry& scene, const CartesianGrid& grid, const AirProperties& air,
                               bool periodic) {
  grid.validate();
  if (!(air.cp > 0.0) || !(air.density_ratio > 0.0)) throw InvalidArgument("air speed and density must be positive");
  if (scene.materials.empty()) throw InvalidArgument("scene has no materials");
  MaterialRaster r;
  r.grid = grid;
  r.periodic = periodic;
  r.lambda = Array2D(grid.nx, grid.ny);
  r.mu = Array2D(grid.nx, grid.ny);
  r.region.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0);
  Array2D rho(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Point p{grid.x(i), grid.y(j)};
      const int reg = scene.region(p);
      const Material& m = scene.materials[static_cast<std::size_t>(reg)];
      if (scene.in_cavity(p)) {
        const double ra = air.density_ratio * m.rho();
        rho(i, j) = ra;
        r.lambda(i, j) = ra * air.cp * air.cp;
        r.mu(i, j) = 0.0;
        r.region[static_cast<std::size_t>(j) * grid.nx + i] = MaterialRaster::kAir;
      } else {
        rho(i, j) = m.rho();
        r.lambda(i, j) = m.lambda();
        r.mu(i, j) = m.mu();
        r.region[static_cast<std::size_t>(j) * grid.nx + i] = static_cast<std::uint8_t>(reg);
      }
      if (!(rho(i, j) > 0.0)) throw InvalidArgument("non-positive density in the raster");
    }
  const Sizes s = sizes(grid, periodic);
  r.mu_xy = Array2D(s.xy_nx, s.xy_ny);
  r.rho_x = Array2D(s.vx_nx, s.vx_ny);
  r.rho_y = Array2D(s.vy_nx, s.vy_ny);
  auto node = [&](const Array2D& a, int i, int j) {
    return a(wrap_index(i, grid.nx, periodic), wrap_index(j, grid.ny, periodic));
  };
  for (int j = 0; j < s.vx_ny; ++j)
    for (int i = 0; i < s.vx_nx; ++i) r.rho_x(i, j) = 0.5 * (node(rho, i, j) + node(rho, i + 1, j));
  for (int j = 0; j < s.vy_ny; ++j)
    for (int i = 0; i < s.vy_nx; ++i) r.rho_y(i, j) = 0.5 * (node(rho, i, j) + node(rho, i, j + 1));
  for (int j = 0; j < s.xy_ny; ++j)
    for (int i = 0; i < s.xy_nx; ++i)
      r.mu_xy(i, j) = harmonic4(node(r.mu, i, j), node(r.mu, i + 1, j), node(r.mu, i, j + 1), node(r.mu, i + 1, j + 1));
  return r;
}

double raster_max_p_speed(const MaterialRaster& r) {
  const auto& g = r.grid;
  auto m = [&](int i, int j) {
    const int a = wrap_index(i, g.nx, r.periodic), b = wrap_index(j, g.ny, r.periodic);
    return r.lambda(a, b) + 2.0 * r.mu(a, b);
  };
  double c2 = 0.0;
  for (int j = 0; j < r.rho_x.ny(); ++j)
    for (int i = 0; i < r.rho_x.nx(); ++i) c2 = std::max(c2, std::max(m(i, j), m(i + 1, j)) / r.rho_x(i, j));
  for (int j = 0; j < r.rho_y.ny(); ++j)
    for (int i = 0; i < r.rho_y.nx(); ++i) c2 = std::max(c2, std::max(m(i, j), m(i, j + 1)) / r.rho_y(i, j));
  return std::sqrt(c2);
}

double cfl_dt(const MaterialRaster& raster, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw InvalidArgument("CFL safety must lie in (0, 1]");
  const double c = raster_max_p_speed(raster);
  if (!(c > 0.0)) throw InvalidArgument("maximum P speed is zero");
  return safety * std::min(raster.grid.hx, raster.grid.hy) / (c * svs_stability_constant());
}

SvsSolver::SvsSolver(MaterialRaster raster, SvsOptions options) : raster_(std::move(raster)), options_(options) {
  const auto& g = raster_.grid;
  g.validate();
  if (options_.sponge_width < 0.0) throw InvalidArgument("sponge width must be non-negative");
  if (!(options_.sponge_reflection > 0.0 && options_.sponge_reflection < 1.0))
    throw InvalidArgument("sponge reflection must lie in (0, 1)");
  if (raster_.periodic && options_.sponge_width > 0.0) throw InvalidArgument("periodic grids take no sponge");
  const Sizes s = sizes(g, raster_.periodic);
  sxx_ = PaddedArray(g.nx, g.ny);
  syy_ = PaddedArray(g.nx, g.ny);
  vx_ = PaddedArray(s.vx_nx, s.vx_ny);
  vy_ = PaddedArray(s.vy_nx, s.vy_ny);
  sxy_ = PaddedArray(s.xy_nx, s.xy_ny);
  ux_ = PaddedArray(s.vx_nx, s.vx_ny);
  uy_ = PaddedArray(s.vy_nx, s.vy_ny);
  lam2mu_ = Array2D(g.nx, g.ny);
  for (std::size_t k = 0; k < lam2mu_.size(); ++k) lam2mu_.data()[k] = raster_.lambda.data()[k] + 2.0 * raster_.mu.data()[k];
}

Point SvsSolver::node_position(int i, int j) const { return {grid().x(i), grid().y(j)}; }
Point SvsSolver::vx_position(int i, int j) const { return {grid().x(i + 0.5), grid().y(j)}; }
Point SvsSolver::vy_position(int i, int j) const { return {grid().x(i), grid().y(j + 0.5)}; }
Point SvsSolver::sxy_position(int i, int j) const { return {grid().x(i + 0.5), grid().y(j + 0.5)}; }

void SvsSolver::start(double t0, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  t0_ = t0;
  dt_ = dt;
  steps_ = 0;
  sponge_ = options_.sponge_width > 0.0;
  if (!sponge_) return;
  const auto& g = grid();
  const double W = options_.sponge_width;
  const double d0 = 3.0 * raster_max_p_speed(raster_) * std::log(1.0 / options_.sponge_reflection) / (2.0 * W);
  const double x0 = g.origin.x, x1 = g.x_max(), y0 = g.origin.y, y1 = g.y_max();
  auto factor = [&](Point p) {
    auto prof = [&](double e) { return e > 0.0 ? (e / W) * (e / W) : 0.0; };
    const double d = d0 * (prof(W - (p.x - x0)) + prof(W - (x1 - p.x)) + prof(W - (p.y - y0)) + prof(W - (y1 - p.y)));
    return std::exp(-d * dt);
  };
  auto fill = [&](Array2D& a, int mx, int my, auto pos) {
    a = Array2D(mx, my);
    for (int j = 0; j < my; ++j)
      for (int i = 0; i < mx; ++i) a(i, j) = factor(pos(i, j));
  };
  fill(damp_node_, g.nx, g.ny, [&](int i, int j) { return node_position(i, j); });
  fill(damp_x_, vx_.mx(), vx_.my(), [&](int i, int j) { return vx_position(i, j); });
  fill(damp_y_, vy_.mx(), vy_.my(), [&](int i, int j) { return vy_position(i, j); });
  fill(damp_xy_, sxy_.mx(), sxy_.my(), [&](int i, int j) { return sxy_position(i, j); });
}

void SvsSolver::add_source(const SourceSpec& spec) {
  spec.validate();
  const auto& g = grid();
  StaggeredLoad load;
  load.omega = spec.omega;
  auto push_x = [&](int i, int j, double v) {
    if (v == 0.0) return;
    if (i < 0 || j < 0 || i >= vx_.mx() || j >= vx_.my()) throw InvalidArgument("source too close to the grid edge");
    load.x_idx.emplace_back(i, j);
    load.x_val.push_back(spec.amplitude * v / raster_.rho_x(i, j));
  };
  auto push_y = [&](int i, int j, double v) {
    if (v == 0.0) return;
    if (i < 0 || j < 0 || i >= vy_.mx() || j >= vy_.my()) throw InvalidArgument("source too close to the grid edge");
    load.y_idx.emplace_back(i, j);
    load.y_val.push_back(spec.amplitude * v / raster_.rho_y(i, j));
  };
  if (spec.kind == SourceKind::Dipole) {
    const DeltaStencil d = build_delta_stencil(spec.position, g, spec.moment_order);
    auto dv = [&](int a, int b) { return (a < 0 || b < 0 || a >= d.nx || b >= d.ny) ? 0.0 : d.at(a, b); };
    // Staggered derivatives of the node delta land on vx and vy points.
    for (int b = 0; b < d.ny; ++b)
      for (int a = -2; a < d.nx + 1; ++a) {
        const double v = (kSvsC1 * (dv(a + 1, b) - dv(a, b)) + kSvsC2 * (dv(a + 2, b) - dv(a - 1, b))) / g.hx;
        push_x(d.i0 + a, d.j0 + b, v);
      }
    for (int b = -2; b < d.ny + 1; ++b)
      for (int a = 0; a < d.nx; ++a) {
        const double v = (kSvsC1 * (dv(a, b + 1) - dv(a, b)) + kSvsC2 * (dv(a, b + 2) - dv(a, b - 1))) / g.hy;
        push_y(d.i0 + a, d.j0 + b, v);
      }
  } else {
    const double n = std::hypot(spec.direction.x, spec.direction.y);
    CartesianGrid gx{{g.origin.x + 0.5 * g.hx, g.origin.y}, vx_.mx(), vx_.my(), g.hx, g.hy};
    CartesianGrid gy{{g.origin.x, g.origin.y + 0.5 * g.hy}, vy_.mx(), vy_.my(), g.hx, g.hy};
    const DeltaStencil dx = build_delta_stencil(spec.position, gx, spec.moment_order);
    const DeltaStencil dy = build_delta_stencil(spec.position, gy, spec.moment_order);
    for (int b = 0; b < dx.ny; ++b)
      for (int a = 0; a < dx.nx; ++a) push_x(dx.i0 + a, dx.j0 + b, dx.at(a, b) * spec.direction.x / n);
    for (int b = 0; b < dy.ny; ++b)
      for (int a = 0; a < dy.nx; ++a) push_y(dy.i0 + a, dy.j0 + b, dy.at(a, b) * spec.direction.y / n);
  }
  sources_.push_back(std::move(load));
}

void SvsSolver::step() {
  if (!(dt_ > 0.0)) throw Error("solver not started");
  const double t = time();
  const auto& g = grid();
  const double dt = dt_, ihx = 1.0 / g.hx, ihy = 1.0 / g.hy;
  const double c1 = kSvsC1, c2 = kSvsC2;
  const bool per = raster_.periodic;
  if (per) {
    sxx_.wrap();
    syy_.wrap();
    sxy_.wrap();
  }
  // Velocities.
  {
    const int mx = vx_.mx(), my = vx_.my();
    ELASTIC2D_PARALLEL_FOR
    for (int j = 0; j < my; ++j) {
      double* v = vx_.row(j);
      const double* s = sxx_.row(j);
      const double *q0 = sxy_.row(j), *qm1 = sxy_.row(j - 1), *qp1 = sxy_.row(j + 1), *qm2 = sxy_.row(j - 2);
      const double* rho = raster_.rho_x.data() + static_cast<std::size_t>(j) * mx;
      for (int i = 0; i < mx; ++i) {
        const double dsx = (c1 * (s[i + 1] - s[i]) + c2 * (s[i + 2] - s[i - 1])) * ihx;
        const double dsy = (c1 * (q0[i] - qm1[i]) + c2 * (qp1[i] - qm2[i])) * ihy;
        v[i] += dt * (dsx + dsy) / rho[i];
      }
    }
  }
  {
    const int mx = vy_.mx(), my = vy_.my();
    ELASTIC2D_PARALLEL_FOR
    for (int j = 0; j < my; ++j) {
      double* v = vy_.row(j);
      const double* q = sxy_.row(j);
      const double *s0 = syy_.row(j), *s1 = syy_.row(j + 1), *s2 = syy_.row(j + 2), *sm = syy_.row(j - 1);
      const double* rho = raster_.rho_y.data() + static_cast<std::size_t>(j) * mx;
      for (int i = 0; i < mx; ++i) {
        const double dsx = (c1 * (q[i] - q[i - 1]) + c2 * (q[i + 1] - q[i - 2])) * ihx;
        const double dsy = (c1 * (s1[i] - s0[i]) + c2 * (s2[i] - sm[i])) * ihy;
        v[i] += dt * (dsx + dsy) / rho[i];
      }
    }
  }
  for (const auto& src : sources_) {
    const double h = source_time_function(t, src.omega);
    if (h == 0.0) continue;
    for (std::size_t k = 0; k < src.x_idx.size(); ++k) vx_(src.x_idx[k].first, src.x_idx[k].second) += dt * h * src.x_val[k];
    for (std::size_t k = 0; k < src.y_idx.size(); ++k) vy_(src.y_idx[k].first, src.y_idx[k].second) += dt * h * src.y_val[k];
  }
  if (body_force_) {
    for (int j = 0; j < vx_.my(); ++j)
      for (int i = 0; i < vx_.mx(); ++i) vx_(i, j) += dt * body_force_(vx_position(i, j), t).x / raster_.rho_x(i, j);
    for (int j = 0; j < vy_.my(); ++j)
      for (int i = 0; i < vy_.mx(); ++i) vy_(i, j) += dt * body_force_(vy_position(i, j), t).y / raster_.rho_y(i, j);
  }
  if (sponge_) {
    for (int j = 0; j < vx_.my(); ++j)
      for (int i = 0; i < vx_.mx(); ++i) vx_(i, j) *= damp_x_(i, j);
    for (int j = 0; j < vy_.my(); ++j)
      for (int i = 0; i < vy_.mx(); ++i) vy_(i, j) *= damp_y_(i, j);
  }
  for (int j = 0; j < vx_.my(); ++j) {
    double* u = ux_.row(j);
    const double* v = vx_.row(j);
    for (int i = 0; i < vx_.mx(); ++i) u[i] += dt * v[i];
  }
  for (int j = 0; j < vy_.my(); ++j) {
    double* u = uy_.row(j);
    const double* v = vy_.row(j);
    for (int i = 0; i < vy_.mx(); ++i) u[i] += dt * v[i];
  }
  if (per) {
    vx_.wrap();
    vy_.wrap();
  }
  sxx_old_ = sxx_;
  syy_old_ = syy_;
  sxy_old_ = sxy_;
  // Stresses.
  {
    const int mx = g.nx, my = g.ny;
    ELASTIC2D_PARALLEL_FOR
    for (int j = 0; j < my; ++j) {
      double *a = sxx_.row(j), *b = syy_.row(j);
      const double* v = vx_.row(j);
      const double *w0 = vy_.row(j), *wm1 = vy_.row(j - 1), *wp1 = vy_.row(j + 1), *wm2 = vy_.row(j - 2);
      const double* lam = raster_.lambda.data() + static_cast<std::size_t>(j) * mx;
      const double* l2m = lam2mu_.data() + static_cast<std::size_t>(j) * mx;
      for (int i = 0; i < mx; ++i) {
        const double dvx = (c1 * (v[i] - v[i - 1]) + c2 * (v[i + 1] - v[i - 2])) * ihx;
        const double dvy = (c1 * (w0[i] - wm1[i]) + c2 * (wp1[i] - wm2[i])) * ihy;
        a[i] += dt * (l2m[i] * dvx + lam[i] * dvy);
        b[i] += dt * (lam[i] * dvx + l2m[i] * dvy);
      }
    }
  }
  {
    const int mx = sxy_.mx(), my = sxy_.my();
    ELASTIC2D_PARALLEL_FOR
    for (int j = 0; j < my; ++j) {
      double* q = sxy_.row(j);
      const double *v0 = vx_.row(j), *v1 = vx_.row(j + 1), *v2 = vx_.row(j + 2), *vm = vx_.row(j - 1);
      const double* w = vy_.row(j);
      const double* mu = raster_.mu_xy.data() + static_cast<std::size_t>(j) * mx;
      for (int i = 0; i < mx; ++i) {
        if (mu[i] == 0.0) continue;
        const double dvxy = (c1 * (v1[i] - v0[i]) + c2 * (v2[i] - vm[i])) * ihy;
        const double dvyx = (c1 * (w[i + 1] - w[i]) + c2 * (w[i + 2] - w[i - 1])) * ihx;
        q[i] += dt * mu[i] * (dvxy + dvyx);
      }
    }
  }
  if (sponge_) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        sxx_(i, j) *= damp_node_(i, j);
        syy_(i, j) *= damp_node_(i, j);
      }
    for (int j = 0; j < sxy_.my(); ++j)
      for (int i = 0; i < sxy_.mx(); ++i) sxy_(i, j) *= damp_xy_(i, j);
  }
  ++steps_;
  if (steps_ % 100 == 0) check_finite();
}

void SvsSolver::check_finite(double cap) const {
  for (const PaddedArray* a : {&vx_, &vy_, &sxx_, &syy_, &sxy_}) {
    const double m = a->max_abs();
    if (!std::isfinite(m) || m > cap) throw InstabilityError("velocity-stress solution blew up", steps_);
  }
}

double SvsSolver::energy() const {
  // Kinetic energy of v at the half step plus the strain energy product of
  // the two stress levels around it; the leapfrog conserves this exactly.
  const auto& g = grid();
  const bool started = steps_ > 0;
  const PaddedArray& axx = started ? sxx_old_ : sxx_;
  const PaddedArray& ayy = started ? syy_old_ : syy_;
  const PaddedArray& axy = started ? sxy_old_ : sxy_;
  double e = 0.0;
  for (int j = 0; j < vx_.my(); ++j)
    for (int i = 0; i < vx_.mx(); ++i) e += 0.5 * raster_.rho_x(i, j) * vx_(i, j) * vx_(i, j);
  for (int j = 0; j < vy_.my(); ++j)
    for (int i = 0; i < vy_.mx(); ++i) e += 0.5 * raster_.rho_y(i, j) * vy_(i, j) * vy_(i, j);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double lam = raster_.lambda(i, j), mu = raster_.mu(i, j);
      const double p = 0.5 * (sxx_(i, j) + syy_(i, j)), q = 0.5 * (sxx_(i, j) - syy_(i, j));
      const double po = 0.5 * (axx(i, j) + ayy(i, j)), qo = 0.5 * (axx(i, j) - ayy(i, j));
      e += p * po / (2.0 * (lam + mu));
      if (mu > 0.0) e += q * qo / (2.0 * mu);
    }
  for (int j = 0; j < sxy_.my(); ++j)
    for (int i = 0; i < sxy_.mx(); ++i)
      if (raster_.mu_xy(i, j) > 0.0) e += sxy_(i, j) * axy(i, j) / (2.0 * raster_.mu_xy(i, j));
  return e * g.hx * g.hy;
}

SvsSolver::Probe SvsSolver::probe(Point p) const {
  const auto& g = grid();
  auto solid = [&](int i, int j) {
    const int a = wrap_index(i, g.nx, raster_.periodic), b = wrap_index(j, g.ny, raster_.periodic);
    return a >= 0 && b >= 0 && !raster_.is_air(a, b);
  };
  auto best = [&](int mx, int my, auto pos, auto ok, int& bi, int& bj) {
    const int ci = std::clamp(static_cast<int>(std::lround((p.x - g.origin.x) / g.hx)), 0, mx - 1);
    const int cj = std::clamp(static_cast<int>(std::lround((p.y - g.origin.y) / g.hy)), 0, my - 1);
    double bd = 1e300, fd = 1e300;
    int fi = ci, fj = cj;
    bool found = false;
    for (int j = std::max(0, cj - 4); j <= std::min(my - 1, cj + 4); ++j)
      for (int i = std::max(0, ci - 4); i <= std::min(mx - 1, ci + 4); ++i) {
        const Point q = pos(i, j);
        const double d = std::hypot(q.x - p.x, q.y - p.y);
        if (d < fd) {
          fd = d;
          fi = i;
          fj = j;
        }
        if (ok(i, j) && d < bd) {
          bd = d;
          bi = i;
          bj = j;
          found = true;
        }
      }
    if (!found) {
      bi = fi;
      bj = fj;
    }
  };
  Probe pr;
  best(vx_.mx(), vx_.my(), [&](int i, int j) { return vx_position(i, j); },
       [&](int i, int j) { return solid(i, j) && solid(i + 1, j); }, pr.ix, pr.jx);
  best(vy_.mx(), vy_.my(), [&](int i, int j) { return vy_position(i, j); },
       [&](int i, int j) { return solid(i, j) && solid(i, j + 1); }, pr.iy, pr.jy);
  return pr;
}

Point SvsSolver::read(const Probe& p) const { return {ux_(p.ix, p.jx), uy_(p.iy, p.jy)}; }

void SvsSolver::node_displacement(Array2D& ux, Array2D& uy) const {
  const auto& g = grid();
  ux = Array2D(g.nx, g.ny);
  uy = Array2D(g.nx, g.ny);
  const bool per = raster_.periodic;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double s = 0.0;
      int n = 0;
      for (int a : {i - 1, i}) {
        const int k = per ? wrap_index(a, ux_.mx(), true) : a;
        if (k >= 0 && k < ux_.mx()) {
          s += ux_(k, j);
          ++n;
        }
      }
      ux(i, j) = n ? s / n : 0.0;
      s = 0.0;
      n = 0;
      for (int b : {j - 1, j}) {
        const int k = per ? wrap_index(b, uy_.my(), true) : b;
        if (k >= 0 && k < uy_.my()) {
          s += uy_(i, k);
          ++n;
        }
      }
      uy(i, j) = n ? s / n : 0.0;
    }
}

}  // namespace elastic2d
