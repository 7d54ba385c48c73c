#pragma once

#include <array>
#include <string>
#include <vector>

#include "elastic2d/curve.hpp"
#include "elastic2d/grid.hpp"
#include "elastic2d/material.hpp"
#include "elastic2d/scene.hpp"

namespace elastic2d {

/// Block sides. xi runs west to east, eta south to north.
enum class Side { West = 0, East = 1, South = 2, North = 3 };

const char* side_name(Side s);
Side side_from_name(const std::string& name);
const char* boundary_kind_name(BoundaryKind k);

struct BoundaryTag {
  BoundaryKind kind = BoundaryKind::TractionFree;
  int partner_block = -1;
  Side partner_side = Side::West;

  bool operator==(const BoundaryTag&) const = default;
};

/// Structured curvilinear block; coordinates stored with xi fastest.
struct CurvilinearBlock {
  int n_xi = 0;
  int n_eta = 0;
  std::vector<double> X;
  std::vector<double> Y;
  std::array<BoundaryTag, 4> tags{};
  int material_id = 0;

  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * n_xi + i; }
  Point node(int i, int j) const { return {X[index(i, j)], Y[index(i, j)]}; }
  BoundaryTag& tag(Side s) { return tags[static_cast<std::size_t>(s)]; }
  const BoundaryTag& tag(Side s) const { return tags[static_cast<std::size_t>(s)]; }
  /// Number of nodes along a side.
  int side_nodes(Side s) const { return s == Side::West || s == Side::East ? n_eta : n_xi; }
  /// Node k along a side, in increasing eta (west/east) or xi (south/north).
  Point side_node(Side s, int k) const;
  /// Minimum signed cell area from the two cell diagonals (positive for a
  /// right-handed, unfolded block).
  double min_cell_area() const;
  double max_spacing() const;
  double min_spacing() const;
};

struct MultiblockMesh {
  std::vector<CurvilinearBlock> blocks;
  std::vector<Material> materials;

  /// Checks array sizes, positive cell areas, symmetric interface tags and
  /// coincident interface nodes (tolerance 1e-12 relative to the extent).
  void validate() const;
  double max_spacing() const;
  double min_spacing() const;
  std::size_t node_count() const;
};

/// Bilinear transfinite (Coons) interpolation. south/north run west to
/// east, west/east run south to north.
CurvilinearBlock transfinite_block(const BoundaryCurve& south, const BoundaryCurve& north,
                                   const BoundaryCurve& west, const BoundaryCurve& east, int n_xi, int n_eta);

/// Single ring block around a circular cavity: xi from the circle (west,
/// traction free) to the rectangle outline (east, `outer`), eta
/// counterclockwise with the south and north lines joined by an interface
/// of the block with itself. The spacing h bounds the physical spacing;
/// min_nodes is a lower bound on the node count in each direction.
MultiblockMesh annulus_in_rectangle(Point centre, double r, double x_min, double x_max, double y_min,
                                    double y_max, double h, const Material& material,
                                    BoundaryKind outer = BoundaryKind::Radiation, int min_nodes = 0);

/// Multiblock mesh of a scene: four quarter-ring blocks per cavity, a
/// Cartesian frame of blocks around them and, with an interface, a curved
/// band row above and a row below the interface curve. Physical spacing
/// is bounded by h.
MultiblockMesh scene_mesh(const SceneGeometry& scene, double h, int min_nodes = 0);

/// The tunnel scene: two cavities above a curved material interface.
MultiblockMesh tunnel_scene_mesh(const SceneGeometry& scene, double h, int min_nodes = 0);

/// Mesh file: text header then little-endian float64 X and Y per block.
void write_mesh(const MultiblockMesh& mesh, const std::string& path);
MultiblockMesh read_mesh(const std::string& path);

}  // namespace elastic2d
