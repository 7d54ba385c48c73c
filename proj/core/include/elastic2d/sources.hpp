#pragma once

#include <vector>

#include "elastic2d/grid.hpp"
#include "elastic2d/sbp_solver.hpp"

namespace elastic2d {

/// h(t) = sin(2 pi w t) - sin(4 pi w t)/2 on (0, 1/w), zero elsewhere.
double source_time_function(double t, double omega);
/// k-th time derivative of h (zero outside the support).
double source_time_derivative(double t, double omega, int k);

enum class SourceKind {
  Dipole,  ///< F = grad(delta) h(t)
  Force,   ///< F = direction delta h(t)
};

struct SourceSpec {
  Point position;
  double omega = 2.0;
  SourceKind kind = SourceKind::Dipole;
  Point direction{1.0, 0.0};
  double amplitude = 1.0;
  /// Moments 0..moment_order of the discrete delta are exact.
  int moment_order = 3;

  void validate() const;
};

/// Tensor-product discrete delta. Weights are per unit area: the sum of
/// weight * cell area is one.
struct DeltaStencil {
  int i0 = 0;
  int j0 = 0;
  int nx = 0;
  int ny = 0;
  std::vector<double> weights;  // nx * ny, x fastest

  double at(int a, int b) const { return weights[static_cast<std::size_t>(b) * nx + a]; }
};

/// 1D moment-matched weights (Lagrange basis at the source) on nodes
/// first..first+order. `offset` is the source position in node units.
std::vector<double> delta_weights_1d(double offset, int moment_order, int& first);

/// Delta on a Cartesian grid. Near an edge the window slides inward. Throws
/// InvalidArgument for points outside the grid or grids narrower than the
/// stencil.
DeltaStencil build_delta_stencil(Point p, const CartesianGrid& grid, int moment_order);

/// Delta on a curvilinear block at logical position (xi, eta); weights are
/// divided by the Jacobian. Same edge handling.
DeltaStencil build_delta_stencil(double xi, double eta, const Array2D& jacobian, int moment_order);

/// Node loads J H F of a source on the SBP mesh, ready to be scaled by
/// h(t). The dipole gradient is taken with the solver's own D1.
struct SbpSourceLoad {
  int block = 0;
  std::vector<std::size_t> nodes;
  std::vector<double> fx;
  std::vector<double> fy;
};

SbpSourceLoad build_sbp_source(const SbpSolver& solver, const SourceSpec& spec);
/// Registers the source as a load on the solver.
void attach_sbp_source(SbpSolver& solver, const SourceSpec& spec);

}  // namespace elastic2d
