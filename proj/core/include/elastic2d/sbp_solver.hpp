#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "elastic2d/grid.hpp"
#include "elastic2d/mesh.hpp"
#include "elastic2d/sbp_operators.hpp"

namespace elastic2d {

/// Metric terms of a block. Logical coordinates have unit spacing.
struct BlockMetrics {
  Array2D x_xi, x_eta, y_xi, y_eta, J;
  /// Gradient factors: d/dx = xi_x d/dxi + eta_x d/deta, and so on.
  Array2D xi_x, xi_y, eta_x, eta_y;
};

/// Metrics by applying D1 to the coordinates. Throws InvalidMesh when
/// J <= 0 anywhere.
BlockMetrics compute_metrics(const CurvilinearBlock& block, const SbpOperators& ops_xi, const SbpOperators& ops_eta);

/// Displacement pair on one block.
struct BlockField {
  Array2D u;
  Array2D v;
};
using Field = std::vector<BlockField>;

struct SbpOptions {
  int order = 8;
  double cfl_safety = 0.9;
  double penalty_safety = 1.2;
  int lanczos_steps = 40;
  unsigned seed = 12345u;
};

/// Summary of the penalty strengths on one block side (for run logs).
struct PenaltyReport {
  int block = 0;
  Side side = Side::West;
  BoundaryKind kind = BoundaryKind::TractionFree;
  double tau_min = 0.0;
  double tau_max = 0.0;
};

/// SBP-SAT solver of rho u_tt = div sigma(u) + f on a multiblock
/// curvilinear mesh, written as M u'' = -K u - C u' + F with M = rho J H.
///
/// K comes from the discrete strain energy. Traction-free sides are
/// natural; Dirichlet sides and interfaces use symmetric (Nitsche-type)
/// penalties; radiation sides add the damping C of a first-order
/// characteristic condition.
class SbpSolver {
 public:
  /// (block, node index, t, time derivative order) -> boundary value.
  using DataFn = std::function<Point(int, std::size_t, double, int)>;
  /// (t, time derivative order, loads): adds integrated forces J H f.
  using LoadFn = std::function<void(double, int, Field&)>;

  SbpSolver(MultiblockMesh mesh, SbpOptions options = {});

  const MultiblockMesh& mesh() const noexcept { return mesh_; }
  const SbpOptions& options() const noexcept { return options_; }
  int block_count() const noexcept { return static_cast<int>(mesh_.blocks.size()); }
  const BlockMetrics& metrics(int b) const { return geo_[static_cast<std::size_t>(b)].m; }
  const SbpOperators& ops_xi(int b) const { return *geo_[static_cast<std::size_t>(b)].oxi; }
  const SbpOperators& ops_eta(int b) const { return *geo_[static_cast<std::size_t>(b)].oeta; }
  /// Quadrature weight J H at every node (integrates over the block).
  const Array2D& quadrature(int b) const { return geo_[static_cast<std::size_t>(b)].wj; }
  const Material& material(int b) const;
  std::vector<PenaltyReport> penalties() const;

  /// Dirichlet sides read their data here (zero when unset).
  void set_dirichlet_data(DataFn fn) { dirichlet_ = std::move(fn); }
  /// Optional traction data on traction-free sides (zero when unset).
  void set_traction_data(DataFn fn) { traction_ = std::move(fn); }
  void add_load(LoadFn fn) { loads_.push_back(std::move(fn)); }

  /// Largest stable step of the scheme (Lanczos estimate of the top
  /// eigenvalue of M^-1 K, 2% margin, times cfl_safety).
  double stable_time_step() const;
  /// Sets dt and t0; u(t0) and u(t0 - dt) are taken from `initial`
  /// (zero when empty).
  void start(double t0, double dt, const std::function<Point(int, std::size_t, double)>& initial = {});

  double dt() const noexcept { return dt_; }
  double time() const noexcept { return t0_ + static_cast<double>(steps_) * dt_; }
  long steps() const noexcept { return steps_; }

  /// Advances one step with the fourth order two-step scheme.
  void step();
  /// Throws InstabilityError if any value is NaN/Inf or above `cap`.
  void check_finite(double cap = 1e100) const;

  /// Discrete energy at the half step between the two stored levels; it is
  /// exactly conserved without forcing, data and damping.
  double energy() const;

  const Field& displacement() const noexcept { return u_; }
  const Field& previous_displacement() const noexcept { return u_prev_; }
  Field zero_field() const;

  /// Acceleration M^-1 (-K u + boundary data + loads) at time t.
  void acceleration(const Field& u, double t, Field& out) const;
  /// The same without data and loads: -M^-1 K u.
  void homogeneous_acceleration(const Field& u, Field& out) const;
  /// Magnitude of the penalty force (before M^-1) on one side, max over
  /// the side's nodes, evaluated for field u at time t.
  double side_penalty_magnitude(const Field& u, double t, int block, Side side) const;

  /// Applies the solver's derivative to a grid function: physical x and y
  /// derivatives through D1 and the metric terms.
  void gradient(int block, const Array2D& f, Array2D& fx, Array2D& fy) const;

  /// Block and logical coordinates of a physical point (Newton inversion of
  /// the local Lagrange interpolant). Returns false if no block contains p.
  bool locate(Point p, int& block, double& xi, double& eta) const;
  /// Displacement at p: node value when p is a node, otherwise 4x4
  /// Lagrange interpolation in logical coordinates.
  Point sample(Point p) const;

 private:
  struct SideData {
    Side side;
    BoundaryKind kind;
    std::vector<std::size_t> nodes;
    std::vector<double> s, nx, ny, tau;
    int partner = -1;
    Side partner_side = Side::West;
    std::vector<std::size_t> partner_nodes;
  };
  struct Geometry {
    std::shared_ptr<const SbpOperators> oxi, oeta;
    BlockMetrics m;
    Array2D wj, mass;
    // Dispersion correction tensors on correction rows.
    Array2D cxi11, cxi12, cxi22, ceta11, ceta12, ceta22;
    double lambda = 0.0, mu = 0.0, rho = 1.0;
    std::vector<SideData> sides;
    // Radiation damping per node: index, c11, c12, c22.
    std::vector<std::size_t> damp_nodes;
    std::vector<std::array<double, 3>> damp;
  };
  struct Work {
    Array2D ux, uy, vx, vy, sxx, syy, sxy, fuxi, fueta, fvxi, fveta;
  };

  void setup_geometry();
  void setup_sides();
  // out = -K u + data terms (data scaled per time derivative order).
  void stiffness(const Field& u, const DataFn* dirichlet, const DataFn* traction, double t, int tderiv, Field& out) const;
  void stresses(int b, const BlockField& f, Work& w) const;

  MultiblockMesh mesh_;
  SbpOptions options_;
  std::vector<Geometry> geo_;
  DataFn dirichlet_;
  DataFn traction_;
  std::vector<LoadFn> loads_;
  Field u_, u_prev_;
  mutable std::vector<Work> work_;
  mutable Field scratch_a_, scratch_b_, load_;
  double t0_ = 0.0;
  double dt_ = 0.0;
  long steps_ = 0;
};

}  // namespace elastic2d
