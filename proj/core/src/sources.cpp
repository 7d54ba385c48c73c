#include "elastic2d/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "elastic2d/error.hpp"

namespace elastic2d {

double source_time_function(double t, double omega) { return source_time_derivative(t, omega, 0); }

double source_time_derivative(double t, double omega, int k) {
  if (!(t > 0.0) || !(t < 1.0 / omega)) return 0.0;
  const double a = 2.0 * std::numbers::pi * omega;
  const double shift = k * std::numbers::pi / 2.0;
  return std::pow(a, k) * std::sin(a * t + shift) - 0.5 * std::pow(2.0 * a, k) * std::sin(2.0 * a * t + shift);
}

void SourceSpec::validate() const {
  if (!(omega > 0.0)) throw InvalidArgument("source frequency must be positive");
  if (moment_order < 0) throw InvalidArgument("delta moment order must be non-negative");
  if (kind == SourceKind::Force && !(std::hypot(direction.x, direction.y) > 0.0))
    throw InvalidArgument("force source needs a nonzero direction");
}

namespace {

// Lagrange basis on nodes first..first+m evaluated at offset.
std::vector<double> lagrange_at(double offset, int first, int m) {
  std::vector<double> w(static_cast<std::size_t>(m) + 1);
  for (int a = 0; a <= m; ++a) {
    double p = 1.0;
    for (int b = 0; b <= m; ++b)
      if (b != a) p *= (offset - (first + b)) / static_cast<double>(a - b);
    w[static_cast<std::size_t>(a)] = p;
  }
  return w;
}

// Window centred on the source: odd widths round to the nearest node.
int centred_first(double offset, int m) {
  return (m % 2 == 1) ? static_cast<int>(std::floor(offset)) - (m - 1) / 2
                      : static_cast<int>(std::lround(offset)) - m / 2;
}

}  // namespace

std::vector<double> delta_weights_1d(double offset, int moment_order, int& first) {
  first = centred_first(offset, moment_order);
  return lagrange_at(offset, first, moment_order);
}

namespace {

// Near an edge the window slides inward; the moments stay exact, only the
// centring is lost.
std::vector<double> window_weights(double offset, int m, int n, int& first) {
  first = std::clamp(centred_first(offset, m), 0, n - m - 1);
  return lagrange_at(offset, first, m);
}

DeltaStencil tensor(double s, double r, int nx, int ny, int moment_order) {
  if (!(s >= 0.0 && s <= nx - 1.0 && r >= 0.0 && r <= ny - 1.0))
    throw InvalidArgument("source lies outside the grid");
  if (moment_order + 1 > nx || moment_order + 1 > ny)
    throw InvalidArgument("grid has fewer nodes than the delta stencil needs");
  DeltaStencil d;
  const auto wx = window_weights(s, moment_order, nx, d.i0);
  const auto wy = window_weights(r, moment_order, ny, d.j0);
  d.nx = static_cast<int>(wx.size());
  d.ny = static_cast<int>(wy.size());
  d.weights.resize(wx.size() * wy.size());
  for (int b = 0; b < d.ny; ++b)
    for (int a = 0; a < d.nx; ++a)
      d.weights[static_cast<std::size_t>(b) * d.nx + a] = wx[static_cast<std::size_t>(a)] * wy[static_cast<std::size_t>(b)];
  return d;
}

}  // namespace

DeltaStencil build_delta_stencil(Point p, const CartesianGrid& grid, int moment_order) {
  grid.validate();
  DeltaStencil d = tensor((p.x - grid.origin.x) / grid.hx, (p.y - grid.origin.y) / grid.hy, grid.nx, grid.ny, moment_order);
  for (double& w : d.weights) w /= grid.hx * grid.hy;
  return d;
}

DeltaStencil build_delta_stencil(double xi, double eta, const Array2D& jacobian, int moment_order) {
  DeltaStencil d = tensor(xi, eta, jacobian.nx(), jacobian.ny(), moment_order);
  for (int b = 0; b < d.ny; ++b)
    for (int a = 0; a < d.nx; ++a) d.weights[static_cast<std::size_t>(b) * d.nx + a] /= jacobian(d.i0 + a, d.j0 + b);
  return d;
}

SbpSourceLoad build_sbp_source(const SbpSolver& solver, const SourceSpec& spec) {
  spec.validate();
  int block = 0;
  double xi = 0.0, eta = 0.0;
  if (!solver.locate(spec.position, block, xi, eta)) throw InvalidArgument("source lies outside the mesh");
  const auto& blk = solver.mesh().blocks[static_cast<std::size_t>(block)];
  const Array2D& J = solver.metrics(block).J;
  const DeltaStencil d = build_delta_stencil(xi, eta, J, spec.moment_order);
  Array2D delta(blk.n_xi, blk.n_eta);
  for (int b = 0; b < d.ny; ++b)
    for (int a = 0; a < d.nx; ++a) delta(d.i0 + a, d.j0 + b) = d.at(a, b);
  Array2D fx(blk.n_xi, blk.n_eta), fy(blk.n_xi, blk.n_eta);
  if (spec.kind == SourceKind::Dipole) {
    solver.gradient(block, delta, fx, fy);
  } else {
    const double n = std::hypot(spec.direction.x, spec.direction.y);
    for (std::size_t k = 0; k < delta.size(); ++k) {
      fx.data()[k] = delta.data()[k] * spec.direction.x / n;
      fy.data()[k] = delta.data()[k] * spec.direction.y / n;
    }
  }
  const Array2D& q = solver.quadrature(block);
  SbpSourceLoad load;
  load.block = block;
  for (std::size_t k = 0; k < fx.size(); ++k) {
    if (fx.data()[k] == 0.0 && fy.data()[k] == 0.0) continue;
    load.nodes.push_back(k);
    load.fx.push_back(spec.amplitude * q.data()[k] * fx.data()[k]);
    load.fy.push_back(spec.amplitude * q.data()[k] * fy.data()[k]);
  }
  return load;
}

void attach_sbp_source(SbpSolver& solver, const SourceSpec& spec) {
  auto load = std::make_shared<SbpSourceLoad>(build_sbp_source(solver, spec));
  const double omega = spec.omega;
  solver.add_load([load, omega](double t, int k, Field& f) {
    const double h = source_time_derivative(t, omega, k);
    if (h == 0.0) return;
    auto& bf = f[static_cast<std::size_t>(load->block)];
    for (std::size_t q = 0; q < load->nodes.size(); ++q) {
      bf.u.data()[load->nodes[q]] += h * load->fx[q];
      bf.v.data()[load->nodes[q]] += h * load->fy[q];
    }
  });
}

}  // namespace elastic2d
