#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "elastic2d/grid.hpp"
#include "elastic2d/scene.hpp"
#include "elastic2d/sources.hpp"

namespace elastic2d {

/// Staggered fourth order coefficients on offsets 1/2 and 3/2.
inline constexpr double kSvsC1 = 9.0 / 8.0;
inline constexpr double kSvsC2 = -1.0 / 24.0;
/// (|c1| + |c2|) sqrt(2).
double svs_stability_constant();

/// Cavity fill. Air is a fluid (mu = 0), so it is not a Material.
struct AirProperties {
  double cp = 0.05;
  /// Air density as a fraction of the density of the surrounding rock.
  double density_ratio = 1.0 / 2000.0;
};

/// Field with two ghost layers on each side. Logical indices run over
/// [-2, m + 1].
class PaddedArray {
 public:
  static constexpr int kGhost = 2;
  PaddedArray() = default;
  PaddedArray(int mx, int my) : mx_(mx), my_(my), stride_(mx + 2 * kGhost),
    data_(static_cast<std::size_t>(mx + 2 * kGhost) * static_cast<std::size_t>(my + 2 * kGhost), 0.0) {}
  int mx() const noexcept { return mx_; }
  int my() const noexcept { return my_; }
  int stride() const noexcept { return stride_; }
  double& operator()(int i, int j) { return data_[offset(i, j)]; }
  double operator()(int i, int j) const { return data_[offset(i, j)]; }
  double* row(int j) { return data_.data() + offset(0, j); }
  const double* row(int j) const { return data_.data() + offset(0, j); }
  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  /// Copies periodic images into the ghost layers.
  void wrap();
  double max_abs() const;

 private:
  std::size_t offset(int i, int j) const noexcept {
    return static_cast<std::size_t>(j + kGhost) * static_cast<std::size_t>(stride_) + static_cast<std::size_t>(i + kGhost);
  }
  int mx_ = 0, my_ = 0, stride_ = 0;
  std::vector<double> data_;
};

/// Material parameters sampled on the staggered layout:
/// normal stresses at nodes (i, j), vx at (i + 1/2, j), vy at (i, j + 1/2),
/// shear stress at (i + 1/2, j + 1/2).
struct MaterialRaster {
  CartesianGrid grid;
  bool periodic = false;
  Array2D lambda, mu;  ///< nodes
  Array2D mu_xy;       ///< shear stress points, harmonic mean of 4 nodes
  Array2D rho_x;       ///< vx points, arithmetic mean of 2 nodes
  Array2D rho_y;       ///< vy points
  /// Region per node: material index, or kAir.
  std::vector<std::uint8_t> region;
  static constexpr std::uint8_t kAir = 255;

  bool is_air(int i, int j) const { return region[static_cast<std::size_t>(j) * grid.nx + i] == kAir; }
};

/// Rasterizes a scene: nodes inside a cavity get air, others the material
/// of their region.
MaterialRaster rasterize_scene(const SceneGeometry& scene, const CartesianGrid& grid, const AirProperties& air,
                               bool periodic = false);
/// Homogeneous raster (used by periodic studies).
MaterialRaster uniform_raster(const Material& material, const CartesianGrid& grid, bool periodic);

/// Largest P speed seen by a velocity point: sqrt(max adjacent (lambda +
/// 2 mu) / rho at the point). Equals cp away from contrasts.
double raster_max_p_speed(const MaterialRaster& raster);
/// safety * min(hx, hy) / (cp_max * C4).
double cfl_dt(const MaterialRaster& raster, double safety);

struct SvsOptions {
  /// Sponge width in length units (zero disables the sponge).
  double sponge_width = 0.0;
  /// Target amplitude reflection of the sponge.
  double sponge_reflection = 1e-4;
};

/// Velocity-stress leapfrog: v at half steps, stresses at whole steps.
class SvsSolver {
 public:
  /// Body force density at a point (MMS studies).
  using ForceFn = std::function<Point(Point, double)>;

  SvsSolver(MaterialRaster raster, SvsOptions options = {});

  const MaterialRaster& raster() const noexcept { return raster_; }
  const CartesianGrid& grid() const noexcept { return raster_.grid; }
  const SvsOptions& options() const noexcept { return options_; }

  Point vx_position(int i, int j) const;
  Point vy_position(int i, int j) const;
  Point node_position(int i, int j) const;
  Point sxy_position(int i, int j) const;

  /// Sets t0 and dt. Fields keep their contents, which callers may set
  /// beforehand: v at t0 - dt/2, stresses and displacement at t0.
  void start(double t0, double dt);
  void add_source(const SourceSpec& spec);
  void set_body_force(ForceFn fn) { body_force_ = std::move(fn); }

  void step();
  double dt() const noexcept { return dt_; }
  double time() const noexcept { return t0_ + static_cast<double>(steps_) * dt_; }
  long steps() const noexcept { return steps_; }
  void check_finite(double cap = 1e100) const;

  PaddedArray& vx() noexcept { return vx_; }
  PaddedArray& vy() noexcept { return vy_; }
  PaddedArray& sxx() noexcept { return sxx_; }
  PaddedArray& syy() noexcept { return syy_; }
  PaddedArray& sxy() noexcept { return sxy_; }
  PaddedArray& ux() noexcept { return ux_; }
  PaddedArray& uy() noexcept { return uy_; }
  const PaddedArray& vx() const noexcept { return vx_; }
  const PaddedArray& vy() const noexcept { return vy_; }
  const PaddedArray& sxx() const noexcept { return sxx_; }
  const PaddedArray& syy() const noexcept { return syy_; }
  const PaddedArray& sxy() const noexcept { return sxy_; }
  const PaddedArray& ux() const noexcept { return ux_; }
  const PaddedArray& uy() const noexcept { return uy_; }

  /// Kinetic plus strain energy, summed with cell area weights. After the
  /// first step the strain part pairs the last two stress levels.
  double energy() const;

  /// Nearest vx and vy sample points to p whose adjacent nodes are all
  /// solid (falls back to the nearest point when there is none nearby).
  struct Probe {
    int ix = 0, jx = 0, iy = 0, jy = 0;
  };
  Probe probe(Point p) const;
  Point read(const Probe& probe) const;

  /// Displacement averaged onto the nodes (for snapshots).
  void node_displacement(Array2D& ux, Array2D& uy) const;

 private:
  struct StaggeredLoad {
    std::vector<std::pair<int, int>> x_idx, y_idx;
    std::vector<double> x_val, y_val;  // force density / rho
    double omega = 0.0;
  };
  MaterialRaster raster_;
  SvsOptions options_;
  PaddedArray vx_, vy_, sxx_, syy_, sxy_, ux_, uy_;
  PaddedArray sxx_old_, syy_old_, sxy_old_;
  Array2D lam2mu_;
  Array2D damp_node_, damp_x_, damp_y_, damp_xy_;
  bool sponge_ = false;
  std::vector<StaggeredLoad> sources_;
  ForceFn body_force_;
  double t0_ = 0.0, dt_ = 0.0;
  long steps_ = 0;
};

}  // namespace elastic2d
