#include "elastic2d/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "binary_io.hpp"
#include "elastic2d/error.hpp"
#include "elastic2d/sbp_solver.hpp"
#include "elastic2d/svs_solver.hpp"

namespace elastic2d {

namespace fs = std::filesystem;

void Snapshot::validate() const {
  for (const auto& p : patches) {
    const auto n = p.size();
    if (p.nx < 2 || p.ny < 2 || p.x.size() != n || p.y.size() != n || p.solid.size() != n || p.ux.size() != n ||
        p.uy.size() != n)
      throw InvalidArgument("snapshot patch arrays do not match its size");
  }
}

namespace {

double field_value(const SnapshotPatch& p, const std::string& field, std::size_t k) {
  if (field == "ux") return p.ux[k];
  if (field == "uy") return p.uy[k];
  if (field == "magnitude") return std::hypot(p.ux[k], p.uy[k]);
  throw InvalidArgument("unknown snapshot field '" + field + "' (ux, uy or magnitude)");
}

}  // namespace

double Snapshot::max_abs(const std::string& field) const {
  double m = 0.0;
  for (const auto& p : patches)
    for (std::size_t k = 0; k < p.size(); ++k)
      if (p.solid[k]) m = std::max(m, std::abs(field_value(p, field, k)));
  return m;
}

Snapshot snapshot_from_sbp(const SbpSolver& solver) {
  Snapshot s;
  s.time = solver.time();
  const auto& mesh = solver.mesh();
  for (int b = 0; b < solver.block_count(); ++b) {
    const auto& blk = mesh.blocks[static_cast<std::size_t>(b)];
    SnapshotPatch p;
    p.nx = blk.n_xi;
    p.ny = blk.n_eta;
    p.x = blk.X;
    p.y = blk.Y;
    p.solid.assign(p.size(), 1);
    p.ux = solver.displacement()[static_cast<std::size_t>(b)].u.values();
    p.uy = solver.displacement()[static_cast<std::size_t>(b)].v.values();
    s.patches.push_back(std::move(p));
  }
  return s;
}

Snapshot snapshot_from_svs(const SvsSolver& solver) {
  Snapshot s;
  s.time = solver.time();
  const auto& g = solver.grid();
  SnapshotPatch p;
  p.nx = g.nx;
  p.ny = g.ny;
  p.x.resize(p.size());
  p.y.resize(p.size());
  p.solid.resize(p.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const auto k = static_cast<std::size_t>(j) * g.nx + i;
      p.x[k] = g.x(i);
      p.y[k] = g.y(j);
      p.solid[k] = solver.raster().is_air(i, j) ? 0 : 1;
    }
  Array2D ux, uy;
  solver.node_displacement(ux, uy);
  p.ux = std::move(ux.values());
  p.uy = std::move(uy.values());
  s.patches.push_back(std::move(p));
  return s;
}

void write_snapshot(const Snapshot& snap, const std::string& directory, const std::string& stem,
                    const std::string& geometry_name, bool write_geometry) {
  snap.validate();
  const fs::path dir(directory);
  fs::create_directories(dir);
  {
    std::ofstream os(dir / (stem + ".txt"));
    if (!os) throw Error("cannot write snapshot sidecar in '" + directory + "'");
    os << "elastic2d-snapshot 1\n" << std::setprecision(17);
    os << "time " << snap.time << "\n";
    os << "fields ux uy\n";
    os << "data " << stem << ".bin\n";
    os << "geometry " << geometry_name << "\n";
    os << "patches " << snap.patches.size() << "\n";
    for (std::size_t k = 0; k < snap.patches.size(); ++k)
      os << "patch " << k << " " << snap.patches[k].nx << " " << snap.patches[k].ny << "\n";
  }
  {
    std::ofstream os(dir / (stem + ".bin"), std::ios::binary);
    if (!os) throw Error("cannot write snapshot data in '" + directory + "'");
    for (const auto& p : snap.patches) {
      write_le(os, p.ux);
      write_le(os, p.uy);
    }
  }
  if (write_geometry) {
    std::ofstream os(dir / geometry_name, std::ios::binary);
    if (!os) throw Error("cannot write snapshot geometry in '" + directory + "'");
    for (const auto& p : snap.patches) {
      write_le(os, p.x);
      write_le(os, p.y);
      write_le(os, std::vector<double>(p.solid.begin(), p.solid.end()));
    }
  }
}

Snapshot read_snapshot(const std::string& path) {
  fs::path sidecar(path);
  if (sidecar.extension() == ".bin") sidecar.replace_extension(".txt");
  std::ifstream is(sidecar);
  if (!is) throw ConfigError("cannot open snapshot sidecar '" + sidecar.string() + "'");
  std::string line, key, data_name, geometry_name;
  Snapshot s;
  std::size_t n_patches = 0;
  if (!std::getline(is, line) || line != "elastic2d-snapshot 1") throw ConfigError(sidecar.string() + ": bad magic");
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    ls >> key;
    if (key == "time") {
      ls >> s.time;
    } else if (key == "data") {
      ls >> data_name;
    } else if (key == "geometry") {
      ls >> geometry_name;
    } else if (key == "patches") {
      ls >> n_patches;
    } else if (key == "patch") {
      std::size_t k;
      SnapshotPatch p;
      ls >> k >> p.nx >> p.ny;
      if (!ls || k != s.patches.size()) throw ConfigError(sidecar.string() + ": malformed patch line");
      s.patches.push_back(std::move(p));
    }
  }
  if (s.patches.size() != n_patches || data_name.empty() || geometry_name.empty())
    throw ConfigError(sidecar.string() + ": incomplete sidecar");
  const auto dir = sidecar.parent_path();
  std::ifstream ds(dir / data_name, std::ios::binary), gs(dir / geometry_name, std::ios::binary);
  if (!ds || !gs) throw ConfigError(sidecar.string() + ": missing data or geometry file");
  for (auto& p : s.patches) {
    const auto n = p.size();
    p.ux.resize(n);
    p.uy.resize(n);
    p.x.resize(n);
    p.y.resize(n);
    std::vector<double> mask(n);
    read_le(ds, p.ux);
    read_le(ds, p.uy);
    read_le(gs, p.x);
    read_le(gs, p.y);
    read_le(gs, mask);
    p.solid.resize(n);
    for (std::size_t k = 0; k < n; ++k) p.solid[k] = mask[k] != 0.0 ? 1 : 0;
  }
  s.validate();
  return s;
}

namespace {

struct Box {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
};

Box bounding_box(const Snapshot& s) {
  Box b;
  for (const auto& p : s.patches)
    for (std::size_t k = 0; k < p.size(); ++k) {
      b.x0 = std::min(b.x0, p.x[k]);
      b.x1 = std::max(b.x1, p.x[k]);
      b.y0 = std::min(b.y0, p.y[k]);
      b.y1 = std::max(b.y1, p.y[k]);
    }
  return b;
}

// Area of cell (i, j)-(i+1, j+1) from its diagonals.
double cell_area(const SnapshotPatch& p, int i, int j) {
  const auto k00 = static_cast<std::size_t>(j) * p.nx + i, k10 = k00 + 1, k01 = k00 + p.nx, k11 = k01 + 1;
  const double ax = p.x[k11] - p.x[k00], ay = p.y[k11] - p.y[k00];
  const double bx = p.x[k01] - p.x[k10], by = p.y[k01] - p.y[k10];
  return 0.5 * std::abs(ax * by - ay * bx);
}

}  // namespace

double rayleigh_energy(const Snapshot& snap, const BoundaryCurve& curve, double width) {
  if (!(width > 0.0)) throw InvalidArgument("rayleigh_energy: band width must be positive");
  snap.validate();
  const Box box = bounding_box(snap);
  for (const Point& c : curve.sample(256)) {
    if (c.x - width < box.x0 || c.x + width > box.x1 || c.y - width < box.y0 || c.y + width > box.y1)
      throw InvalidArgument("rayleigh_energy: band leaves the snapshot domain");
  }
  // Cheap prefilter: bounding box of the curve grown by the width.
  Box cb;
  for (const Point& c : curve.sample(1024)) {
    cb.x0 = std::min(cb.x0, c.x - width);
    cb.x1 = std::max(cb.x1, c.x + width);
    cb.y0 = std::min(cb.y0, c.y - width);
    cb.y1 = std::max(cb.y1, c.y + width);
  }
  double energy = 0.0;
  for (const auto& p : snap.patches) {
    std::vector<double> weight(p.size(), 0.0);
    for (int j = 0; j + 1 < p.ny; ++j)
      for (int i = 0; i + 1 < p.nx; ++i) {
        const double a = 0.25 * cell_area(p, i, j);
        const auto k = static_cast<std::size_t>(j) * p.nx + i;
        weight[k] += a;
        weight[k + 1] += a;
        weight[k + p.nx] += a;
        weight[k + p.nx + 1] += a;
      }
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!p.solid[k]) continue;
      const Point q{p.x[k], p.y[k]};
      if (q.x < cb.x0 || q.x > cb.x1 || q.y < cb.y0 || q.y > cb.y1) continue;
      if (curve.distance(q) > width) continue;
      energy += weight[k] * (p.ux[k] * p.ux[k] + p.uy[k] * p.uy[k]);
    }
  }
  return energy;
}

void render_ppm(const Snapshot& snap, const std::string& field, const std::string& path, int max_pixels) {
  if (max_pixels < 2) throw InvalidArgument("render_ppm: image too small");
  snap.validate();
  const Box box = bounding_box(snap);
  const double extent = std::max(box.x1 - box.x0, box.y1 - box.y0);
  if (!(extent > 0.0)) throw InvalidArgument("render_ppm: degenerate snapshot");
  const double px = extent / (max_pixels - 1);
  const int w = static_cast<int>(std::ceil((box.x1 - box.x0) / px)) + 1;
  const int h = static_cast<int>(std::ceil((box.y1 - box.y0) / px)) + 1;
  const double scale = snap.max_abs(field);
  std::vector<unsigned char> gray(static_cast<std::size_t>(w) * h, 128);
  // Each cell paints the pixels whose centres fall inside it, using the
  // mean of its solid corners.
  for (const auto& p : snap.patches) {
    for (int j = 0; j + 1 < p.ny; ++j)
      for (int i = 0; i + 1 < p.nx; ++i) {
        const std::size_t k[4] = {static_cast<std::size_t>(j) * p.nx + i, static_cast<std::size_t>(j) * p.nx + i + 1,
                                  static_cast<std::size_t>(j + 1) * p.nx + i + 1,
                                  static_cast<std::size_t>(j + 1) * p.nx + i};
        double sum = 0.0;
        int solid = 0;
        for (auto c : k)
          if (p.solid[c]) {
            sum += field_value(p, field, c);
            ++solid;
          }
        if (solid == 0) continue;
        const double v = scale > 0.0 ? sum / solid / scale : 0.0;
        const auto g = static_cast<unsigned char>(std::clamp(std::lround(127.5 + 127.5 * v), 0L, 255L));
        double x0 = p.x[k[0]], x1 = x0, y0 = p.y[k[0]], y1 = y0;
        for (auto c : k) {
          x0 = std::min(x0, p.x[c]);
          x1 = std::max(x1, p.x[c]);
          y0 = std::min(y0, p.y[c]);
          y1 = std::max(y1, p.y[c]);
        }
        const int c0 = std::max(0, static_cast<int>(std::floor((x0 - box.x0) / px)));
        const int c1 = std::min(w - 1, static_cast<int>(std::ceil((x1 - box.x0) / px)));
        const int r0 = std::max(0, static_cast<int>(std::floor((y0 - box.y0) / px)));
        const int r1 = std::min(h - 1, static_cast<int>(std::ceil((y1 - box.y0) / px)));
        for (int r = r0; r <= r1; ++r)
          for (int c = c0; c <= c1; ++c) {
            const double qx = box.x0 + c * px, qy = box.y0 + r * px;
            // Inside the quad if on the left of every edge (either winding).
            int pos = 0, neg = 0;
            for (int e = 0; e < 4; ++e) {
              const auto a = k[e], b = k[(e + 1) % 4];
              const double cr = (p.x[b] - p.x[a]) * (qy - p.y[a]) - (p.y[b] - p.y[a]) * (qx - p.x[a]);
              if (cr > 1e-14) ++pos;
              if (cr < -1e-14) ++neg;
            }
            if (pos > 0 && neg > 0) continue;
            gray[static_cast<std::size_t>(h - 1 - r) * w + c] = g;
          }
      }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << "P6\n" << w << " " << h << "\n255\n";
  for (unsigned char g : gray) {
    const char rgb[3] = {static_cast<char>(g), static_cast<char>(g), static_cast<char>(g)};
    os.write(rgb, 3);
  }
}

}  // namespace elastic2d
