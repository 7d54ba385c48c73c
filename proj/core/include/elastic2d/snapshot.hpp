#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elastic2d/curve.hpp"
#include "elastic2d/grid.hpp"

namespace elastic2d {

class SbpSolver;
class SvsSolver;

/// One structured patch of a snapshot: node coordinates, a solid mask and
/// the two displacement components, all nx * ny with i fastest.
struct SnapshotPatch {
  int nx = 0;
  int ny = 0;
  std::vector<double> x, y;
  std::vector<std::uint8_t> solid;
  std::vector<double> ux, uy;

  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
};

struct Snapshot {
  double time = 0.0;
  std::vector<SnapshotPatch> patches;

  /// Throws InvalidArgument on inconsistent patch sizes.
  void validate() const;
  double max_abs(const std::string& field) const;
};

/// One patch per block; every node is solid.
Snapshot snapshot_from_sbp(const SbpSolver& solver);
/// One patch on the node lattice; air nodes are masked out.
Snapshot snapshot_from_svs(const SvsSolver& solver);

/// Writes <stem>.bin (ux then uy per patch, float64 little endian), the
/// text sidecar <stem>.txt, and the geometry file named in the sidecar
/// (coordinates and mask) unless `write_geometry` is false.
void write_snapshot(const Snapshot& snap, const std::string& directory, const std::string& stem,
                    const std::string& geometry_name = "geometry.bin", bool write_geometry = true);
/// Reads a snapshot given the path of its sidecar or its .bin file.
Snapshot read_snapshot(const std::string& path);

/// Integral of |u|^2 over solid nodes within `width` of the curve, with
/// node weights from quarter cell areas. Throws InvalidArgument when the
/// band leaves the snapshot's bounding box.
double rayleigh_energy(const Snapshot& snap, const BoundaryCurve& curve, double width);

/// Grayscale PPM of ux, uy or magnitude with a symmetric linear scale
/// (zero is mid gray). The longer image side has `max_pixels` pixels.
void render_ppm(const Snapshot& snap, const std::string& field, const std::string& path, int max_pixels = 800);

}  // namespace elastic2d
