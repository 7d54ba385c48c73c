#include "elastic2d/sbp_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

#include "elastic2d/error.hpp"
#include "parallel.hpp"

namespace elastic2d {

namespace {

// Row-oriented D1 along xi (contiguous) and eta (across rows).
void d_xi(const SbpOperators& o, const Array2D& in, Array2D& out) {
  const int nx = in.nx();
  ELASTIC2D_PARALLEL_FOR
  for (int j = 0; j < in.ny(); ++j) o.apply_d1(in.data() + static_cast<std::size_t>(j) * nx, 1, out.data() + static_cast<std::size_t>(j) * nx, 1);
}

void dt_xi(const SbpOperators& o, const Array2D& in, Array2D& out, bool add) {
  const int nx = in.nx();
  ELASTIC2D_PARALLEL_FOR
  for (int j = 0; j < in.ny(); ++j)
    o.apply_d1_transpose(in.data() + static_cast<std::size_t>(j) * nx, 1, out.data() + static_cast<std::size_t>(j) * nx, 1, add);
}

inline void row_axpy(double a, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

void d_eta(const SbpOperators& o, const Array2D& in, Array2D& out) {
  const int n = in.ny(), nx = in.nx(), r = o.closure_rows();
  const auto& a = o.interior();
  const int w = o.half_width();
  auto row = [&](const Array2D& A, int j) { return A.data() + static_cast<std::size_t>(j) * nx; };
  auto orow = [&](int j) { return out.data() + static_cast<std::size_t>(j) * nx; };
  ELASTIC2D_PARALLEL_FOR
  for (int j = 0; j < n; ++j) {
    double* y = orow(j);
    std::fill(y, y + nx, 0.0);
    if (j < r) {
      const auto& L = o.closure()[static_cast<std::size_t>(j)];
      for (int l = 0; l < static_cast<int>(L.size()); ++l)
        if (L[static_cast<std::size_t>(l)] != 0.0) row_axpy(L[static_cast<std::size_t>(l)], row(in, l), y, nx);
    } else if (j >= n - r) {
      const auto& L = o.closure()[static_cast<std::size_t>(n - 1 - j)];
      for (int l = 0; l < static_cast<int>(L.size()); ++l)
        if (L[static_cast<std::size_t>(l)] != 0.0) row_axpy(-L[static_cast<std::size_t>(l)], row(in, n - 1 - l), y, nx);
    } else {
      for (int m = 1; m <= w; ++m) {
        const double c = a[static_cast<std::size_t>(m - 1)];
        const double* p = row(in, j + m);
        const double* q = row(in, j - m);
        for (int i = 0; i < nx; ++i) y[i] += c * (p[i] - q[i]);
      }
    }
  }
}

void dt_eta(const SbpOperators& o, const Array2D& in, Array2D& out, bool add) {
  const int n = in.ny(), nx = in.nx();
  const int w = o.half_width();
  const int cw = o.closure_rows() + w;
  const auto& a = o.interior();
  auto row = [&](int j) { return in.data() + static_cast<std::size_t>(j) * nx; };
  ELASTIC2D_PARALLEL_FOR
  for (int j = 0; j < n; ++j) {
    double* y = out.data() + static_cast<std::size_t>(j) * nx;
    if (!add) std::fill(y, y + nx, 0.0);
    if (j < cw) {
      for (const auto& [i, v] : o.transpose_column(j)) row_axpy(v, row(i), y, nx);
    } else if (j >= n - cw) {
      for (const auto& [i, v] : o.transpose_column(n - 1 - j)) row_axpy(-v, row(n - 1 - i), y, nx);
    } else {
      for (int m = 1; m <= w; ++m) {
        const double c = a[static_cast<std::size_t>(m - 1)];
        const double* p = row(j - m);
        const double* q = row(j + m);
        for (int i = 0; i < nx; ++i) y[i] += c * (p[i] - q[i]);
      }
    }
  }
}

// Lagrange basis on nodes 0..n-1 evaluated at x, with derivatives.
void lagrange(int n, double x, double* l, double* dl) {
  for (int a = 0; a < n; ++a) {
    double p = 1.0, dp = 0.0;
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const double f = (x - b) / (a - b);
      dp = dp * f + p / (a - b);
      p *= f;
    }
    l[a] = p;
    if (dl) dl[a] = dp;
  }
}

}  // namespace

BlockMetrics compute_metrics(const CurvilinearBlock& block, const SbpOperators& oxi, const SbpOperators& oeta) {
  if (oxi.size() != block.n_xi || oeta.size() != block.n_eta) throw InvalidArgument("operator size does not match block");
  BlockMetrics m;
  const int nx = block.n_xi, ny = block.n_eta;
  Array2D X(nx, ny), Y(nx, ny);
  std::copy(block.X.begin(), block.X.end(), X.data());
  std::copy(block.Y.begin(), block.Y.end(), Y.data());
  for (Array2D* a : {&m.x_xi, &m.x_eta, &m.y_xi, &m.y_eta, &m.J, &m.xi_x, &m.xi_y, &m.eta_x, &m.eta_y}) *a = Array2D(nx, ny);
  d_xi(oxi, X, m.x_xi);
  d_eta(oeta, X, m.x_eta);
  d_xi(oxi, Y, m.y_xi);
  d_eta(oeta, Y, m.y_eta);
  for (std::size_t k = 0; k < X.size(); ++k) {
    const double J = m.x_xi.data()[k] * m.y_eta.data()[k] - m.x_eta.data()[k] * m.y_xi.data()[k];
    if (!(J > 0.0)) throw InvalidMesh("non-positive Jacobian at node " + std::to_string(k));
    m.J.data()[k] = J;
    m.xi_x.data()[k] = m.y_eta.data()[k] / J;
    m.xi_y.data()[k] = -m.x_eta.data()[k] / J;
    m.eta_x.data()[k] = -m.y_xi.data()[k] / J;
    m.eta_y.data()[k] = m.x_xi.data()[k] / J;
  }
  return m;
}

SbpSolver::SbpSolver(MultiblockMesh mesh, SbpOptions options) : mesh_(std::move(mesh)), options_(options) {
  mesh_.validate();
  if (!(options_.penalty_safety >= 1.0)) throw InvalidArgument("penalty safety factor must be at least 1");
  if (!(options_.cfl_safety > 0.0 && options_.cfl_safety <= 1.0)) throw InvalidArgument("CFL safety must lie in (0, 1]");
  setup_geometry();
  setup_sides();
  u_ = zero_field();
  u_prev_ = zero_field();
  scratch_a_ = zero_field();
  scratch_b_ = zero_field();
  load_ = zero_field();
  work_.resize(mesh_.blocks.size());
  for (std::size_t b = 0; b < mesh_.blocks.size(); ++b) {
    const int nx = mesh_.blocks[b].n_xi, ny = mesh_.blocks[b].n_eta;
    auto& w = work_[b];
    for (Array2D* a : {&w.ux, &w.uy, &w.vx, &w.vy, &w.sxx, &w.syy, &w.sxy, &w.fuxi, &w.fueta, &w.fvxi, &w.fveta})
      *a = Array2D(nx, ny);
  }
}

const Material& SbpSolver::material(int b) const {
  return mesh_.materials[static_cast<std::size_t>(mesh_.blocks[static_cast<std::size_t>(b)].material_id)];
}

Field SbpSolver::zero_field() const {
  Field f(mesh_.blocks.size());
  for (std::size_t b = 0; b < f.size(); ++b) {
    f[b].u = Array2D(mesh_.blocks[b].n_xi, mesh_.blocks[b].n_eta);
    f[b].v = Array2D(mesh_.blocks[b].n_xi, mesh_.blocks[b].n_eta);
  }
  return f;
}

void SbpSolver::setup_geometry() {
  geo_.resize(mesh_.blocks.size());
  for (std::size_t b = 0; b < mesh_.blocks.size(); ++b) {
    const auto& blk = mesh_.blocks[b];
    auto& g = geo_[b];
    try {
      g.oxi = SbpOperators::build(options_.order, blk.n_xi);
      g.oeta = SbpOperators::build(options_.order, blk.n_eta);
    } catch (const InvalidArgument& e) {
      throw InvalidMesh("block " + std::to_string(b) + " is too small: " + e.what());
    }
    try {
      g.m = compute_metrics(blk, *g.oxi, *g.oeta);
    } catch (const InvalidMesh& e) {
      throw InvalidMesh("block " + std::to_string(b) + ": " + e.what());
    }
    const Material& mat = material(static_cast<int>(b));
    g.lambda = mat.lambda();
    g.mu = mat.mu();
    g.rho = mat.rho();
    const int nx = blk.n_xi, ny = blk.n_eta;
    g.wj = Array2D(nx, ny);
    g.mass = Array2D(nx, ny);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        g.wj(i, j) = g.oxi->norm(i) * g.oeta->norm(j) * g.m.J(i, j);
        g.mass(i, j) = g.rho * g.wj(i, j);
      }
    const int k = g.oxi->correction_order();
    const double alpha = g.oxi->correction_alpha();
    const double l2m = g.lambda + 2.0 * g.mu, lm = g.lambda + g.mu, mu = g.mu;
    auto tensor = [&](double a, double c, double wj_over_j2, std::array<double, 3>& t) {
      t[0] += wj_over_j2 * (l2m * a * a + mu * c * c);
      t[1] += wj_over_j2 * lm * a * c;
      t[2] += wj_over_j2 * (l2m * c * c + mu * a * a);
    };
    g.cxi11 = Array2D(nx - k, ny);
    g.cxi12 = Array2D(nx - k, ny);
    g.cxi22 = Array2D(nx - k, ny);
    for (int j = 0; j < ny; ++j)
      for (int m = 0; m < nx - k; ++m) {
        const auto [c0, c1] = g.oxi->correction_centre(m);
        std::array<double, 3> t{0, 0, 0};
        for (int c : {c0, c1}) {
          const double W = g.oxi->norm(c) * g.oeta->norm(j);
          tensor(g.m.y_eta(c, j), -g.m.x_eta(c, j), 0.5 * alpha * W / g.m.J(c, j), t);
        }
        g.cxi11(m, j) = t[0];
        g.cxi12(m, j) = t[1];
        g.cxi22(m, j) = t[2];
      }
    g.ceta11 = Array2D(nx, ny - k);
    g.ceta12 = Array2D(nx, ny - k);
    g.ceta22 = Array2D(nx, ny - k);
    for (int m = 0; m < ny - k; ++m)
      for (int i = 0; i < nx; ++i) {
        const auto [c0, c1] = g.oeta->correction_centre(m);
        std::array<double, 3> t{0, 0, 0};
        for (int c : {c0, c1}) {
          const double W = g.oxi->norm(i) * g.oeta->norm(c);
          tensor(-g.m.y_xi(i, c), g.m.x_xi(i, c), 0.5 * alpha * W / g.m.J(i, c), t);
        }
        g.ceta11(i, m) = t[0];
        g.ceta12(i, m) = t[1];
        g.ceta22(i, m) = t[2];
      }
  }
}

void SbpSolver::setup_sides() {
  double extent = 1.0;
  for (const auto& blk : mesh_.blocks)
    for (std::size_t k = 0; k < blk.X.size(); ++k) extent = std::max({extent, std::abs(blk.X[k]), std::abs(blk.Y[k])});
  const double tol = 1e-9 * extent;
  // Nitsche terms touching each node.
  std::vector<Array2D> count(mesh_.blocks.size());
  for (std::size_t b = 0; b < mesh_.blocks.size(); ++b) {
    const auto& blk = mesh_.blocks[b];
    auto& g = geo_[b];
    count[b] = Array2D(blk.n_xi, blk.n_eta);
    for (int s = 0; s < 4; ++s) {
      const Side side = static_cast<Side>(s);
      const BoundaryTag& tag = blk.tag(side);
      SideData sd;
      sd.side = side;
      sd.kind = tag.kind;
      const int n = blk.side_nodes(side);
      const bool along_eta = side == Side::West || side == Side::East;
      const double sign = (side == Side::West || side == Side::South) ? -1.0 : 1.0;
      for (int k = 0; k < n; ++k) {
        int i = 0, j = 0;
        switch (side) {
          case Side::West: i = 0; j = k; break;
          case Side::East: i = blk.n_xi - 1; j = k; break;
          case Side::South: i = k; j = 0; break;
          case Side::North: i = k; j = blk.n_eta - 1; break;
        }
        const std::size_t idx = blk.index(i, j);
        sd.nodes.push_back(idx);
        const double tx = along_eta ? g.m.x_eta(i, j) : g.m.x_xi(i, j);
        const double ty = along_eta ? g.m.y_eta(i, j) : g.m.y_xi(i, j);
        const double hw = along_eta ? g.oeta->norm(j) : g.oxi->norm(i);
        sd.s.push_back(hw * std::hypot(tx, ty));
        const double gx = along_eta ? g.m.xi_x(i, j) : g.m.eta_x(i, j);
        const double gy = along_eta ? g.m.xi_y(i, j) : g.m.eta_y(i, j);
        const double gn = std::hypot(gx, gy);
        sd.nx.push_back(sign * gx / gn);
        sd.ny.push_back(sign * gy / gn);
        if (tag.kind == BoundaryKind::Dirichlet || tag.kind == BoundaryKind::Interface) count[b](i, j) += 1.0;
      }
      if (tag.kind == BoundaryKind::Interface) {
        sd.partner = tag.partner_block;
        sd.partner_side = tag.partner_side;
        const auto& pb = mesh_.blocks[static_cast<std::size_t>(tag.partner_block)];
        if (pb.side_nodes(tag.partner_side) != n)
          throw InvalidMesh("nonconforming interface on block " + std::to_string(b));
        bool same = true, reversed = true;
        for (int k = 0; k < n; ++k) {
          const Point p = blk.side_node(side, k);
          const Point q = pb.side_node(tag.partner_side, k);
          const Point qr = pb.side_node(tag.partner_side, n - 1 - k);
          if (std::hypot(p.x - q.x, p.y - q.y) > tol) same = false;
          if (std::hypot(p.x - qr.x, p.y - qr.y) > tol) reversed = false;
        }
        if (!same && !reversed) throw InvalidMesh("nonconforming interface on block " + std::to_string(b));
        for (int k = 0; k < n; ++k) {
          const int kk = same ? k : n - 1 - k;
          int i = 0, j = 0;
          switch (tag.partner_side) {
            case Side::West: i = 0; j = kk; break;
            case Side::East: i = pb.n_xi - 1; j = kk; break;
            case Side::South: i = kk; j = 0; break;
            case Side::North: i = kk; j = pb.n_eta - 1; break;
          }
          sd.partner_nodes.push_back(pb.index(i, j));
        }
      }
      g.sides.push_back(std::move(sd));
    }
  }
  const double safety = options_.penalty_safety;
  for (std::size_t b = 0; b < mesh_.blocks.size(); ++b) {
    auto& g = geo_[b];
    const double kappa = g.lambda + 2.0 * g.mu;
    std::map<std::size_t, std::array<double, 3>> damp;
    for (auto& sd : g.sides) {
      const std::size_t n = sd.nodes.size();
      sd.tau.assign(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = sd.nodes[k];
        const double cnt = count[b].data()[idx];
        const double w = g.wj.data()[idx];
        if (sd.kind == BoundaryKind::Dirichlet) {
          sd.tau[k] = safety * sd.s[k] * kappa * cnt / w;
        } else if (sd.kind == BoundaryKind::Interface) {
          const auto& pg = geo_[static_cast<std::size_t>(sd.partner)];
          const std::size_t pidx = sd.partner_nodes[k];
          const double pk = pg.lambda + 2.0 * pg.mu;
          const double pc = count[static_cast<std::size_t>(sd.partner)].data()[pidx];
          sd.tau[k] = safety * 0.25 * sd.s[k] * (kappa * cnt / w + pk * pc / pg.wj.data()[pidx]);
        } else if (sd.kind == BoundaryKind::Radiation) {
          const double cp = std::sqrt(kappa / g.rho), cs = std::sqrt(g.mu / g.rho);
          const double nx = sd.nx[k], ny = sd.ny[k];
          auto& c = damp[idx];
          const double f = sd.s[k] * g.rho;
          c[0] += f * (cp * nx * nx + cs * ny * ny);
          c[1] += f * (cp - cs) * nx * ny;
          c[2] += f * (cp * ny * ny + cs * nx * nx);
        }
      }
    }
    for (const auto& [idx, c] : damp) {
      g.damp_nodes.push_back(idx);
      g.damp.push_back(c);
    }
  }
}

std::vector<PenaltyReport> SbpSolver::penalties() const {
  std::vector<PenaltyReport> out;
  for (std::size_t b = 0; b < geo_.size(); ++b)
    for (const auto& sd : geo_[b].sides) {
      if (sd.kind != BoundaryKind::Dirichlet && sd.kind != BoundaryKind::Interface) continue;
      PenaltyReport r;
      r.block = static_cast<int>(b);
      r.side = sd.side;
      r.kind = sd.kind;
      r.tau_min = *std::min_element(sd.tau.begin(), sd.tau.end());
      r.tau_max = *std::max_element(sd.tau.begin(), sd.tau.end());
      out.push_back(r);
    }
  return out;
}

void SbpSolver::stresses(int b, const BlockField& f, Work& w) const {
  const auto& g = geo_[static_cast<std::size_t>(b)];
  d_xi(*g.oxi, f.u, w.ux);
  d_eta(*g.oeta, f.u, w.uy);
  d_xi(*g.oxi, f.v, w.vx);
  d_eta(*g.oeta, f.v, w.vy);
  const double l2m = g.lambda + 2.0 * g.mu, lam = g.lambda, mu = g.mu;
  const std::size_t n = w.ux.size();
  const double *xx = g.m.xi_x.data(), *xy = g.m.xi_y.data(), *ex = g.m.eta_x.data(), *ey = g.m.eta_y.data();
  double *ux = w.ux.data(), *uy = w.uy.data(), *vx = w.vx.data(), *vy = w.vy.data();
  double *sxx = w.sxx.data(), *syy = w.syy.data(), *sxy = w.sxy.data();
  for (std::size_t k = 0; k < n; ++k) {
    const double uxi = ux[k], ueta = uy[k], vxi = vx[k], veta = vy[k];
    const double dux = xx[k] * uxi + ex[k] * ueta;
    const double duy = xy[k] * uxi + ey[k] * ueta;
    const double dvx = xx[k] * vxi + ex[k] * veta;
    const double dvy = xy[k] * vxi + ey[k] * veta;
    ux[k] = dux;
    uy[k] = duy;
    vx[k] = dvx;
    vy[k] = dvy;
    sxx[k] = l2m * dux + lam * dvy;
    syy[k] = lam * dux + l2m * dvy;
    sxy[k] = mu * (duy + dvx);
  }
}

void SbpSolver::stiffness(const Field& u, const DataFn* dirichlet, const DataFn* traction, double t, int tderiv,
                          Field& out) const {
  const int nb = block_count();
  for (int b = 0; b < nb; ++b) stresses(b, u[static_cast<std::size_t>(b)], work_[static_cast<std::size_t>(b)]);
  for (int b = 0; b < nb; ++b) {
    const auto& g = geo_[static_cast<std::size_t>(b)];
    auto& w = work_[static_cast<std::size_t>(b)];
    const auto& f = u[static_cast<std::size_t>(b)];
    auto& o = out[static_cast<std::size_t>(b)];
    const std::size_t n = w.ux.size();
    {
      const double *xx = g.m.xi_x.data(), *xy = g.m.xi_y.data(), *ex = g.m.eta_x.data(), *ey = g.m.eta_y.data();
      const double *sxx = w.sxx.data(), *syy = w.syy.data(), *sxy = w.sxy.data(), *wj = g.wj.data();
      double *fuxi = w.fuxi.data(), *fueta = w.fueta.data(), *fvxi = w.fvxi.data(), *fveta = w.fveta.data();
      for (std::size_t k = 0; k < n; ++k) {
        fuxi[k] = wj[k] * (sxx[k] * xx[k] + sxy[k] * xy[k]);
        fueta[k] = wj[k] * (sxx[k] * ex[k] + sxy[k] * ey[k]);
        fvxi[k] = wj[k] * (sxy[k] * xx[k] + syy[k] * xy[k]);
        fveta[k] = wj[k] * (sxy[k] * ex[k] + syy[k] * ey[k]);
      }
    }
    // Adjoint (symmetrizing) parts of the Nitsche terms enter the fluxes.
    auto adjoint = [&](std::size_t idx, double s, double dx, double dy, double nx, double ny) {
      const double dn = dx * nx + dy * ny;
      const double pxx = g.lambda * dn + 2.0 * g.mu * dx * nx;
      const double pyy = g.lambda * dn + 2.0 * g.mu * dy * ny;
      const double pxy = g.mu * (dx * ny + dy * nx);
      const double xx = g.m.xi_x.data()[idx], xy = g.m.xi_y.data()[idx];
      const double ex = g.m.eta_x.data()[idx], ey = g.m.eta_y.data()[idx];
      w.fuxi.data()[idx] -= s * (pxx * xx + pxy * xy);
      w.fueta.data()[idx] -= s * (pxx * ex + pxy * ey);
      w.fvxi.data()[idx] -= s * (pxy * xx + pyy * xy);
      w.fveta.data()[idx] -= s * (pxy * ex + pyy * ey);
    };
    for (const auto& sd : g.sides) {
      if (sd.kind == BoundaryKind::Dirichlet) {
        for (std::size_t k = 0; k < sd.nodes.size(); ++k) {
          const std::size_t idx = sd.nodes[k];
          Point gd{0.0, 0.0};
          if (dirichlet && *dirichlet) gd = (*dirichlet)(b, idx, t, tderiv);
          adjoint(idx, sd.s[k], f.u.data()[idx] - gd.x, f.v.data()[idx] - gd.y, sd.nx[k], sd.ny[k]);
        }
      } else if (sd.kind == BoundaryKind::Interface) {
        const auto& pf = u[static_cast<std::size_t>(sd.partner)];
        for (std::size_t k = 0; k < sd.nodes.size(); ++k) {
          const std::size_t idx = sd.nodes[k], pidx = sd.partner_nodes[k];
          adjoint(idx, sd.s[k], 0.5 * (f.u.data()[idx] - pf.u.data()[pidx]), 0.5 * (f.v.data()[idx] - pf.v.data()[pidx]),
                  sd.nx[k], sd.ny[k]);
        }
      }
    }
    dt_xi(*g.oxi, w.fuxi, o.u, false);
    dt_eta(*g.oeta, w.fueta, o.u, true);
    dt_xi(*g.oxi, w.fvxi, o.v, false);
    dt_eta(*g.oeta, w.fveta, o.v, true);
    {
      double *ou = o.u.data(), *ov = o.v.data();
      for (std::size_t k = 0; k < n; ++k) {
        ou[k] = -ou[k];
        ov[k] = -ov[k];
      }
    }
    // Dispersion correction along xi and eta.
    const auto& dk = g.oxi->correction_stencil();
    const int kk = g.oxi->correction_order();
    const int nx = f.u.nx(), ny = f.u.ny();
    ELASTIC2D_PARALLEL_FOR
    for (int j = 0; j < ny; ++j) {
      const double* pu = f.u.data() + static_cast<std::size_t>(j) * nx;
      const double* pv = f.v.data() + static_cast<std::size_t>(j) * nx;
      double* qu = o.u.data() + static_cast<std::size_t>(j) * nx;
      double* qv = o.v.data() + static_cast<std::size_t>(j) * nx;
      for (int m = 0; m < nx - kk; ++m) {
        double du = 0.0, dv = 0.0;
        for (int l = 0; l <= kk; ++l) {
          du += dk[static_cast<std::size_t>(l)] * pu[m + l];
          dv += dk[static_cast<std::size_t>(l)] * pv[m + l];
        }
        const double cu = g.cxi11(m, j) * du + g.cxi12(m, j) * dv;
        const double cv = g.cxi12(m, j) * du + g.cxi22(m, j) * dv;
        for (int l = 0; l <= kk; ++l) {
          qu[m + l] -= dk[static_cast<std::size_t>(l)] * cu;
          qv[m + l] -= dk[static_cast<std::size_t>(l)] * cv;
        }
      }
    }
    {
      std::vector<double> du(static_cast<std::size_t>(nx)), dv(static_cast<std::size_t>(nx));
      for (int m = 0; m < ny - kk; ++m) {
        std::fill(du.begin(), du.end(), 0.0);
        std::fill(dv.begin(), dv.end(), 0.0);
        for (int l = 0; l <= kk; ++l) {
          const double c = dk[static_cast<std::size_t>(l)];
          row_axpy(c, f.u.data() + static_cast<std::size_t>(m + l) * nx, du.data(), nx);
          row_axpy(c, f.v.data() + static_cast<std::size_t>(m + l) * nx, dv.data(), nx);
        }
        const double* c11 = g.ceta11.data() + static_cast<std::size_t>(m) * nx;
        const double* c12 = g.ceta12.data() + static_cast<std::size_t>(m) * nx;
        const double* c22 = g.ceta22.data() + static_cast<std::size_t>(m) * nx;
        for (int i = 0; i < nx; ++i) {
          const double a = du[static_cast<std::size_t>(i)], c = dv[static_cast<std::size_t>(i)];
          du[static_cast<std::size_t>(i)] = c11[i] * a + c12[i] * c;
          dv[static_cast<std::size_t>(i)] = c12[i] * a + c22[i] * c;
        }
        for (int l = 0; l <= kk; ++l) {
          const double c = -dk[static_cast<std::size_t>(l)];
          row_axpy(c, du.data(), o.u.data() + static_cast<std::size_t>(m + l) * nx, nx);
          row_axpy(c, dv.data(), o.v.data() + static_cast<std::size_t>(m + l) * nx, nx);
        }
      }
    }
    // Node terms: traction consistency, penalties and traction data.
    for (const auto& sd : g.sides) {
      if (sd.kind == BoundaryKind::Dirichlet) {
        for (std::size_t k = 0; k < sd.nodes.size(); ++k) {
          const std::size_t idx = sd.nodes[k];
          Point gd{0.0, 0.0};
          if (dirichlet && *dirichlet) gd = (*dirichlet)(b, idx, t, tderiv);
          const double nx_ = sd.nx[k], ny_ = sd.ny[k];
          const double tx = w.sxx.data()[idx] * nx_ + w.sxy.data()[idx] * ny_;
          const double ty = w.sxy.data()[idx] * nx_ + w.syy.data()[idx] * ny_;
          const double s = sd.s[k];
          o.u.data()[idx] += s * tx - sd.tau[k] * s * (f.u.data()[idx] - gd.x);
          o.v.data()[idx] += s * ty - sd.tau[k] * s * (f.v.data()[idx] - gd.y);
        }
      } else if (sd.kind == BoundaryKind::Interface) {
        const auto& pf = u[static_cast<std::size_t>(sd.partner)];
        const auto& pw = work_[static_cast<std::size_t>(sd.partner)];
        for (std::size_t k = 0; k < sd.nodes.size(); ++k) {
          const std::size_t idx = sd.nodes[k], pidx = sd.partner_nodes[k];
          const double nx_ = sd.nx[k], ny_ = sd.ny[k];
          const double sxx = 0.5 * (w.sxx.data()[idx] + pw.sxx.data()[pidx]);
          const double syy = 0.5 * (w.syy.data()[idx] + pw.syy.data()[pidx]);
          const double sxy = 0.5 * (w.sxy.data()[idx] + pw.sxy.data()[pidx]);
          const double s = sd.s[k];
          o.u.data()[idx] += s * (sxx * nx_ + sxy * ny_) - sd.tau[k] * s * (f.u.data()[idx] - pf.u.data()[pidx]);
          o.v.data()[idx] += s * (sxy * nx_ + syy * ny_) - sd.tau[k] * s * (f.v.data()[idx] - pf.v.data()[pidx]);
        }
      } else if (sd.kind == BoundaryKind::TractionFree && traction && *traction) {
        for (std::size_t k = 0; k < sd.nodes.size(); ++k) {
          const std::size_t idx = sd.nodes[k];
          const Point gt = (*traction)(b, idx, t, tderiv);
          o.u.data()[idx] += sd.s[k] * gt.x;
          o.v.data()[idx] += sd.s[k] * gt.y;
        }
      }
    }
  }
}

void SbpSolver::acceleration(const Field& u, double t, Field& out) const {
  stiffness(u, &dirichlet_, &traction_, t, 0, out);
  if (!loads_.empty()) {
    for (auto& f : load_) {
      f.u.fill(0.0);
      f.v.fill(0.0);
    }
    for (const auto& fn : loads_) fn(t, 0, load_);
  }
  for (std::size_t b = 0; b < out.size(); ++b) {
    const double* m = geo_[b].mass.data();
    double *ou = out[b].u.data(), *ov = out[b].v.data();
    const std::size_t n = out[b].u.size();
    if (!loads_.empty()) {
      const double *lu = load_[b].u.data(), *lv = load_[b].v.data();
      for (std::size_t k = 0; k < n; ++k) {
        ou[k] = (ou[k] + lu[k]) / m[k];
        ov[k] = (ov[k] + lv[k]) / m[k];
      }
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        ou[k] /= m[k];
        ov[k] /= m[k];
      }
    }
  }
}

void SbpSolver::homogeneous_acceleration(const Field& u, Field& out) const {
  stiffness(u, nullptr, nullptr, 0.0, 0, out);
  for (std::size_t b = 0; b < out.size(); ++b) {
    const double* m = geo_[b].mass.data();
    const std::size_t n = out[b].u.size();
    for (std::size_t k = 0; k < n; ++k) {
      out[b].u.data()[k] /= m[k];
      out[b].v.data()[k] /= m[k];
    }
  }
}

double SbpSolver::stable_time_step() const {
  // Lanczos in the M inner product on A = M^-1 K.
  std::mt19937 rng(options_.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field v = zero_field(), vp = zero_field(), w = zero_field();
  auto dot_m = [&](const Field& a, const Field& c) {
    double s = 0.0;
    for (std::size_t b = 0; b < a.size(); ++b) {
      const double* m = geo_[b].mass.data();
      for (std::size_t k = 0; k < a[b].u.size(); ++k)
        s += m[k] * (a[b].u.data()[k] * c[b].u.data()[k] + a[b].v.data()[k] * c[b].v.data()[k]);
    }
    return s;
  };
  for (auto& f : v)
    for (std::size_t k = 0; k < f.u.size(); ++k) {
      f.u.data()[k] = dist(rng);
      f.v.data()[k] = dist(rng);
    }
  double nrm = std::sqrt(dot_m(v, v));
  for (auto& f : v)
    for (std::size_t k = 0; k < f.u.size(); ++k) {
      f.u.data()[k] /= nrm;
      f.v.data()[k] /= nrm;
    }
  std::vector<double> alpha, beta;
  double beta_prev = 0.0;
  const int steps = std::max(2, options_.lanczos_steps);
  for (int it = 0; it < steps; ++it) {
    homogeneous_acceleration(v, w);
    // w = M^-1 K v (negate the acceleration).
    for (auto& f : w)
      for (std::size_t k = 0; k < f.u.size(); ++k) {
        f.u.data()[k] = -f.u.data()[k];
        f.v.data()[k] = -f.v.data()[k];
      }
    const double a = dot_m(w, v);
    alpha.push_back(a);
    for (std::size_t b = 0; b < w.size(); ++b)
      for (std::size_t k = 0; k < w[b].u.size(); ++k) {
        w[b].u.data()[k] -= a * v[b].u.data()[k] + beta_prev * vp[b].u.data()[k];
        w[b].v.data()[k] -= a * v[b].v.data()[k] + beta_prev * vp[b].v.data()[k];
      }
    const double bn = std::sqrt(dot_m(w, w));
    if (!(bn > 1e-300) || it + 1 == steps) break;
    beta.push_back(bn);
    std::swap(vp, v);
    for (std::size_t b = 0; b < w.size(); ++b)
      for (std::size_t k = 0; k < w[b].u.size(); ++k) {
        v[b].u.data()[k] = w[b].u.data()[k] / bn;
        v[b].v.data()[k] = w[b].v.data()[k] / bn;
      }
    beta_prev = bn;
  }
  const int m = static_cast<int>(alpha.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff() * 1.02;
  if (!(lmax > 0.0)) throw Error("spectral estimate of the SBP operator failed");
  return options_.cfl_safety * std::sqrt(12.0 / lmax);
}

void SbpSolver::start(double t0, double dt, const std::function<Point(int, std::size_t, double)>& initial) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  t0_ = t0;
  dt_ = dt;
  steps_ = 0;
  for (std::size_t b = 0; b < u_.size(); ++b) {
    const std::size_t n = u_[b].u.size();
    for (std::size_t k = 0; k < n; ++k) {
      Point p{0.0, 0.0}, q{0.0, 0.0};
      if (initial) {
        p = initial(static_cast<int>(b), k, t0);
        q = initial(static_cast<int>(b), k, t0 - dt);
      }
      u_[b].u.data()[k] = p.x;
      u_[b].v.data()[k] = p.y;
      u_prev_[b].u.data()[k] = q.x;
      u_prev_[b].v.data()[k] = q.y;
    }
  }
}

void SbpSolver::step() {
  if (!(dt_ > 0.0)) throw Error("solver not started");
  const double t = time();
  Field& a = scratch_a_;
  Field& c = scratch_b_;
  acceleration(u_, t, a);
  stiffness(a, &dirichlet_, &traction_, t, 2, c);
  if (!loads_.empty()) {
    for (auto& f : load_) {
      f.u.fill(0.0);
      f.v.fill(0.0);
    }
    for (const auto& fn : loads_) fn(t, 2, load_);
  }
  const double dt2 = dt_ * dt_, dt4 = dt2 * dt2 / 12.0;
  for (std::size_t b = 0; b < u_.size(); ++b) {
    const auto& g = geo_[b];
    const double* m = g.mass.data();
    const std::size_t n = u_[b].u.size();
    double *u = u_[b].u.data(), *v = u_[b].v.data(), *up = u_prev_[b].u.data(), *vp = u_prev_[b].v.data();
    const double *au = a[b].u.data(), *av = a[b].v.data(), *cu = c[b].u.data(), *cv = c[b].v.data();
    const double *lu = loads_.empty() ? nullptr : load_[b].u.data(), *lv = loads_.empty() ? nullptr : load_[b].v.data();
    // The new level overwrites the oldest one in place.
    for (std::size_t k = 0; k < n; ++k) {
      const double bu = (cu[k] + (lu ? lu[k] : 0.0)) / m[k];
      const double bv = (cv[k] + (lv ? lv[k] : 0.0)) / m[k];
      up[k] = 2.0 * u[k] - up[k] + dt2 * au[k] + dt4 * bu;
      vp[k] = 2.0 * v[k] - vp[k] + dt2 * av[k] + dt4 * bv;
    }
  }
  // Radiation damping, centred in time: (M + dt/2 C) u+ = M r + dt/2 C u-.
  for (std::size_t b = 0; b < u_.size(); ++b) {
    const auto& g = geo_[b];
    if (g.damp_nodes.empty()) continue;
    for (std::size_t q = 0; q < g.damp_nodes.size(); ++q) {
      const std::size_t k = g.damp_nodes[q];
      const auto& C = g.damp[q];
      const double h = 0.5 * dt_ / g.mass.data()[k];
      // u_prev_ now holds the explicit update r; the old level u^{n-1} is
      // recovered from r = 2u - u_old + dt^2 a + dt^4/12 b.
      const double ru = u_prev_[b].u.data()[k], rv = u_prev_[b].v.data()[k];
      const double bu = (c[b].u.data()[k] + (loads_.empty() ? 0.0 : load_[b].u.data()[k])) / g.mass.data()[k];
      const double bv = (c[b].v.data()[k] + (loads_.empty() ? 0.0 : load_[b].v.data()[k])) / g.mass.data()[k];
      const double oldu = 2.0 * u_[b].u.data()[k] + dt2 * a[b].u.data()[k] + dt4 * bu - ru;
      const double oldv = 2.0 * u_[b].v.data()[k] + dt2 * a[b].v.data()[k] + dt4 * bv - rv;
      const double fu = ru + h * (C[0] * oldu + C[1] * oldv);
      const double fv = rv + h * (C[1] * oldu + C[2] * oldv);
      const double a11 = 1.0 + h * C[0], a12 = h * C[1], a22 = 1.0 + h * C[2];
      const double det = a11 * a22 - a12 * a12;
      u_prev_[b].u.data()[k] = (a22 * fu - a12 * fv) / det;
      u_prev_[b].v.data()[k] = (a11 * fv - a12 * fu) / det;
    }
  }
  std::swap(u_, u_prev_);
  ++steps_;
  if (steps_ % 100 == 0) check_finite();
}

void SbpSolver::check_finite(double cap) const {
  for (const auto& f : u_)
    for (const Array2D* a : {&f.u, &f.v})
      for (std::size_t k = 0; k < a->size(); ++k) {
        const double x = a->data()[k];
        if (!std::isfinite(x) || std::abs(x) > cap) throw InstabilityError("SBP-SAT solution blew up", steps_);
      }
}

double SbpSolver::energy() const {
  Field k1 = zero_field(), k0 = zero_field();
  stiffness(u_, nullptr, nullptr, 0.0, 0, k1);
  stiffness(u_prev_, nullptr, nullptr, 0.0, 0, k0);
  double kin = 0.0, pot = 0.0, corr = 0.0;
  for (std::size_t b = 0; b < u_.size(); ++b) {
    const double* m = geo_[b].mass.data();
    const std::size_t n = u_[b].u.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double du = u_[b].u.data()[k] - u_prev_[b].u.data()[k];
      const double dv = u_[b].v.data()[k] - u_prev_[b].v.data()[k];
      kin += m[k] * (du * du + dv * dv);
      // K u = -stiffness(u).
      pot -= u_[b].u.data()[k] * k0[b].u.data()[k] + u_[b].v.data()[k] * k0[b].v.data()[k];
      corr += (k1[b].u.data()[k] * k0[b].u.data()[k] + k1[b].v.data()[k] * k0[b].v.data()[k]) / m[k];
    }
  }
  return 0.5 * kin / (dt_ * dt_) + 0.5 * pot - dt_ * dt_ / 24.0 * corr;
}

double SbpSolver::side_penalty_magnitude(const Field& u, double t, int block, Side side) const {
  for (int b = 0; b < block_count(); ++b) stresses(b, u[static_cast<std::size_t>(b)], work_[static_cast<std::size_t>(b)]);
  const auto& g = geo_[static_cast<std::size_t>(block)];
  const auto& w = work_[static_cast<std::size_t>(block)];
  const auto& f = u[static_cast<std::size_t>(block)];
  const auto& sd = g.sides[static_cast<std::size_t>(side)];
  double m = 0.0;
  for (std::size_t k = 0; k < sd.nodes.size(); ++k) {
    const std::size_t idx = sd.nodes[k];
    const double nx = sd.nx[k], ny = sd.ny[k];
    double tx = w.sxx.data()[idx] * nx + w.sxy.data()[idx] * ny;
    double ty = w.sxy.data()[idx] * nx + w.syy.data()[idx] * ny;
    switch (sd.kind) {
      case BoundaryKind::TractionFree:
      case BoundaryKind::Radiation: {
        if (sd.kind == BoundaryKind::TractionFree && traction_) {
          const Point gt = traction_(block, idx, t, 0);
          tx -= gt.x;
          ty -= gt.y;
        }
        m = std::max(m, std::hypot(tx, ty));
        break;
      }
      case BoundaryKind::Dirichlet: {
        const Point gd = dirichlet_ ? dirichlet_(block, idx, t, 0) : Point{0.0, 0.0};
        m = std::max(m, std::hypot(f.u.data()[idx] - gd.x, f.v.data()[idx] - gd.y));
        break;
      }
      case BoundaryKind::Interface: {
        const auto& pw = work_[static_cast<std::size_t>(sd.partner)];
        const auto& pf = u[static_cast<std::size_t>(sd.partner)];
        const std::size_t pidx = sd.partner_nodes[k];
        const double px = pw.sxx.data()[pidx] * nx + pw.sxy.data()[pidx] * ny;
        const double py = pw.sxy.data()[pidx] * nx + pw.syy.data()[pidx] * ny;
        m = std::max({m, std::hypot(tx - px, ty - py),
                      std::hypot(f.u.data()[idx] - pf.u.data()[pidx], f.v.data()[idx] - pf.v.data()[pidx])});
        break;
      }
    }
  }
  return m;
}

void SbpSolver::gradient(int block, const Array2D& f, Array2D& fx, Array2D& fy) const {
  const auto& g = geo_[static_cast<std::size_t>(block)];
  Array2D a(f.nx(), f.ny()), c(f.nx(), f.ny());
  d_xi(*g.oxi, f, a);
  d_eta(*g.oeta, f, c);
  fx = Array2D(f.nx(), f.ny());
  fy = Array2D(f.nx(), f.ny());
  for (std::size_t k = 0; k < f.size(); ++k) {
    fx.data()[k] = g.m.xi_x.data()[k] * a.data()[k] + g.m.eta_x.data()[k] * c.data()[k];
    fy.data()[k] = g.m.xi_y.data()[k] * a.data()[k] + g.m.eta_y.data()[k] * c.data()[k];
  }
}

bool SbpSolver::locate(Point p, int& block, double& xi, double& eta) const {
  double best = 1e300;
  bool found = false;
  for (int b = 0; b < block_count(); ++b) {
    const auto& blk = mesh_.blocks[static_cast<std::size_t>(b)];
    std::size_t kmin = 0;
    double dmin = 1e300;
    for (std::size_t k = 0; k < blk.X.size(); ++k) {
      const double d = std::hypot(blk.X[k] - p.x, blk.Y[k] - p.y);
      if (d < dmin) {
        dmin = d;
        kmin = k;
      }
    }
    if (dmin >= best) continue;
    double s = static_cast<double>(kmin % static_cast<std::size_t>(blk.n_xi));
    double r = static_cast<double>(kmin / static_cast<std::size_t>(blk.n_xi));
    const double scale = std::max(1e-300, blk.max_spacing());
    if (dmin <= 1e-12 * std::max(1.0, scale)) {
      best = dmin;
      block = b;
      xi = s;
      eta = r;
      found = true;
      continue;
    }
    bool ok = false;
    for (int it = 0; it < 30; ++it) {
      const int i0 = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, blk.n_xi - 4);
      const int j0 = std::clamp(static_cast<int>(std::floor(r)) - 1, 0, blk.n_eta - 4);
      double lx[4], dlx[4], ly[4], dly[4];
      lagrange(4, s - i0, lx, dlx);
      lagrange(4, r - j0, ly, dly);
      double x = 0, y = 0, xs = 0, xr = 0, ys = 0, yr = 0;
      for (int b2 = 0; b2 < 4; ++b2)
        for (int a2 = 0; a2 < 4; ++a2) {
          const Point q = blk.node(i0 + a2, j0 + b2);
          x += lx[a2] * ly[b2] * q.x;
          y += lx[a2] * ly[b2] * q.y;
          xs += dlx[a2] * ly[b2] * q.x;
          ys += dlx[a2] * ly[b2] * q.y;
          xr += lx[a2] * dly[b2] * q.x;
          yr += lx[a2] * dly[b2] * q.y;
        }
      const double det = xs * yr - xr * ys;
      if (det == 0.0) break;
      const double ex = p.x - x, ey = p.y - y;
      const double ds = (yr * ex - xr * ey) / det, dr = (-ys * ex + xs * ey) / det;
      s += ds;
      r += dr;
      if (s < -0.5 || r < -0.5 || s > blk.n_xi - 0.5 || r > blk.n_eta - 0.5) break;
      if (std::abs(ds) + std::abs(dr) < 1e-13 * std::max(1.0, static_cast<double>(blk.n_xi + blk.n_eta))) {
        ok = true;
        break;
      }
    }
    const double eps = 1e-9;
    if (ok && s >= -eps && r >= -eps && s <= blk.n_xi - 1 + eps && r <= blk.n_eta - 1 + eps) {
      best = dmin;
      block = b;
      xi = std::clamp(s, 0.0, static_cast<double>(blk.n_xi - 1));
      eta = std::clamp(r, 0.0, static_cast<double>(blk.n_eta - 1));
      found = true;
    }
  }
  return found;
}

Point SbpSolver::sample(Point p) const {
  int b = 0;
  double s = 0.0, r = 0.0;
  if (!locate(p, b, s, r)) throw InvalidArgument("point lies outside the mesh");
  const auto& f = u_[static_cast<std::size_t>(b)];
  const double rs = std::round(s), rr = std::round(r);
  if (std::abs(s - rs) < 1e-7 && std::abs(r - rr) < 1e-7) {
    const int i = static_cast<int>(rs), j = static_cast<int>(rr);
    return {f.u(i, j), f.v(i, j)};
  }
  const auto& blk = mesh_.blocks[static_cast<std::size_t>(b)];
  const int i0 = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, blk.n_xi - 4);
  const int j0 = std::clamp(static_cast<int>(std::floor(r)) - 1, 0, blk.n_eta - 4);
  double lx[4], ly[4];
  lagrange(4, s - i0, lx, nullptr);
  lagrange(4, r - j0, ly, nullptr);
  Point out{0.0, 0.0};
  for (int b2 = 0; b2 < 4; ++b2)
    for (int a2 = 0; a2 < 4; ++a2) {
      out.x += lx[a2] * ly[b2] * f.u(i0 + a2, j0 + b2);
      out.y += lx[a2] * ly[b2] * f.v(i0 + a2, j0 + b2);
    }
  return out;
}

}  // namespace elastic2d
