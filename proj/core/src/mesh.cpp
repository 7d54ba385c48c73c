#include "elastic2d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "elastic2d/error.hpp"

namespace elastic2d {

namespace {

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

int intervals_for(double length, double h, int min_intervals, bool even) {
  int n = std::max(min_intervals, static_cast<int>(std::ceil(length / h - 1e-9)));
  n = std::max(n, 1);
  if (even && n % 2 != 0) ++n;
  return n;
}

void require_corner(Point a, Point b, double scale, const char* which) {
  if (dist(a, b) > 1e-12 * std::max(1.0, scale)) {
    throw InvalidArgument(std::string("transfinite block corner mismatch at ") + which);
  }
}

void set_side(CurvilinearBlock& b, Side s, int k, Point p) {
  std::size_t idx = 0;
  switch (s) {
    case Side::West: idx = b.index(0, k); break;
    case Side::East: idx = b.index(b.n_xi - 1, k); break;
    case Side::South: idx = b.index(k, 0); break;
    case Side::North: idx = b.index(k, b.n_eta - 1); break;
  }
  b.X[idx] = p.x;
  b.Y[idx] = p.y;
}

double mesh_extent(const MultiblockMesh& m) {
  double e = 0.0;
  for (const auto& b : m.blocks)
    for (std::size_t k = 0; k < b.X.size(); ++k) e = std::max({e, std::abs(b.X[k]), std::abs(b.Y[k])});
  return std::max(e, 1.0);
}

// Orientation of side (b2, s2) relative to (b1, s1): +1 same order, -1
// reversed, 0 not coincident.
int match_sides(const CurvilinearBlock& b1, Side s1, const CurvilinearBlock& b2, Side s2, double tol) {
  const int n = b1.side_nodes(s1);
  if (b2.side_nodes(s2) != n) return 0;
  auto all = [&](bool reversed) {
    for (int k = 0; k < n; ++k)
      if (dist(b1.side_node(s1, k), b2.side_node(s2, reversed ? n - 1 - k : k)) > tol) return false;
    return true;
  };
  if (all(false)) return 1;
  if (all(true)) return -1;
  return 0;
}

// Pairs every untagged side with a coincident side, snaps partner nodes
// onto the first side's nodes, and tags the rest with `outer`.
void pair_sides(MultiblockMesh& mesh, const std::vector<std::array<bool, 4>>& fixed, BoundaryKind outer) {
  const double tol = 1e-9 * mesh_extent(mesh);
  const auto nb = mesh.blocks.size();
  std::vector<std::array<bool, 4>> done = fixed;
  for (std::size_t b = 0; b < nb; ++b) {
    for (int s = 0; s < 4; ++s) {
      if (done[b][static_cast<std::size_t>(s)]) continue;
      bool found = false;
      for (std::size_t b2 = b; b2 < nb && !found; ++b2) {
        for (int s2 = 0; s2 < 4 && !found; ++s2) {
          if (b2 == b && s2 <= s) continue;
          if (done[b2][static_cast<std::size_t>(s2)]) continue;
          const int o = match_sides(mesh.blocks[b], static_cast<Side>(s), mesh.blocks[b2], static_cast<Side>(s2), tol);
          if (o == 0) continue;
          found = true;
          auto& A = mesh.blocks[b];
          auto& B = mesh.blocks[b2];
          A.tag(static_cast<Side>(s)) = {BoundaryKind::Interface, static_cast<int>(b2), static_cast<Side>(s2)};
          B.tag(static_cast<Side>(s2)) = {BoundaryKind::Interface, static_cast<int>(b), static_cast<Side>(s)};
          const int n = A.side_nodes(static_cast<Side>(s));
          for (int k = 0; k < n; ++k)
            set_side(B, static_cast<Side>(s2), o > 0 ? k : n - 1 - k, A.side_node(static_cast<Side>(s), k));
          done[b][static_cast<std::size_t>(s)] = true;
          done[b2][static_cast<std::size_t>(s2)] = true;
        }
      }
      if (!found) {
        mesh.blocks[b].tag(static_cast<Side>(s)) = {outer, -1, Side::West};
        done[b][static_cast<std::size_t>(s)] = true;
      }
    }
  }
}

CurvilinearBlock rectangle_block(double x0, double x1, double y0, double y1, int nx, int ny) {
  return transfinite_block(BoundaryCurve::segment({x0, y0}, {x1, y0}), BoundaryCurve::segment({x0, y1}, {x1, y1}),
                           BoundaryCurve::segment({x0, y0}, {x0, y1}), BoundaryCurve::segment({x1, y0}, {x1, y1}),
                           nx + 1, ny + 1);
}

}  // namespace

const char* side_name(Side s) {
  switch (s) {
    case Side::West: return "west";
    case Side::East: return "east";
    case Side::South: return "south";
    case Side::North: return "north";
  }
  return "?";
}

Side side_from_name(const std::string& name) {
  if (name == "west") return Side::West;
  if (name == "east") return Side::East;
  if (name == "south") return Side::South;
  if (name == "north") return Side::North;
  throw ConfigError("unknown block side '" + name + "'");
}

const char* boundary_kind_name(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::TractionFree: return "traction-free";
    case BoundaryKind::Radiation: return "radiation";
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Interface: return "interface";
  }
  return "?";
}

Point CurvilinearBlock::side_node(Side s, int k) const {
  switch (s) {
    case Side::West: return node(0, k);
    case Side::East: return node(n_xi - 1, k);
    case Side::South: return node(k, 0);
    case Side::North: return node(k, n_eta - 1);
  }
  return {};
}

double CurvilinearBlock::min_cell_area() const {
  double m = 1e300;
  for (int j = 0; j + 1 < n_eta; ++j)
    for (int i = 0; i + 1 < n_xi; ++i) {
      const Point a = node(i, j), b = node(i + 1, j), c = node(i + 1, j + 1), d = node(i, j + 1);
      // Cross product of the diagonals is twice the signed area; also check
      // both triangles at each corner to catch non-convex cells.
      const double diag = 0.5 * ((c.x - a.x) * (d.y - b.y) - (c.y - a.y) * (d.x - b.x));
      const double t1 = (b.x - a.x) * (d.y - a.y) - (b.y - a.y) * (d.x - a.x);
      const double t2 = (c.x - b.x) * (a.y - b.y) - (c.y - b.y) * (a.x - b.x);
      const double t3 = (d.x - c.x) * (b.y - c.y) - (d.y - c.y) * (b.x - c.x);
      const double t4 = (a.x - d.x) * (c.y - d.y) - (a.y - d.y) * (c.x - d.x);
      m = std::min({m, diag, t1 > 0 && t2 > 0 && t3 > 0 && t4 > 0 ? diag : std::min({t1, t2, t3, t4})});
    }
  return m;
}

double CurvilinearBlock::max_spacing() const {
  double m = 0.0;
  for (int j = 0; j < n_eta; ++j)
    for (int i = 0; i < n_xi; ++i) {
      if (i + 1 < n_xi) m = std::max(m, dist(node(i, j), node(i + 1, j)));
      if (j + 1 < n_eta) m = std::max(m, dist(node(i, j), node(i, j + 1)));
    }
  return m;
}

double CurvilinearBlock::min_spacing() const {
  double m = 1e300;
  for (int j = 0; j < n_eta; ++j)
    for (int i = 0; i < n_xi; ++i) {
      if (i + 1 < n_xi) m = std::min(m, dist(node(i, j), node(i + 1, j)));
      if (j + 1 < n_eta) m = std::min(m, dist(node(i, j), node(i, j + 1)));
    }
  return m;
}

void MultiblockMesh::validate() const {
  if (blocks.empty()) throw InvalidMesh("mesh has no blocks");
  const double tol = 1e-12 * mesh_extent(*this);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    const std::string id = "block " + std::to_string(b);
    if (blk.n_xi < 2 || blk.n_eta < 2) throw InvalidMesh(id + " needs at least 2x2 nodes");
    const auto n = static_cast<std::size_t>(blk.n_xi) * static_cast<std::size_t>(blk.n_eta);
    if (blk.X.size() != n || blk.Y.size() != n) throw InvalidMesh(id + " coordinate arrays have wrong size");
    if (blk.material_id < 0 || static_cast<std::size_t>(blk.material_id) >= materials.size())
      throw InvalidMesh(id + " refers to an unknown material");
    if (!(blk.min_cell_area() > 0.0)) throw InvalidMesh(id + " is folded (non-positive cell area)");
    for (int s = 0; s < 4; ++s) {
      const auto& t = blk.tags[static_cast<std::size_t>(s)];
      if (t.kind != BoundaryKind::Interface) continue;
      if (t.partner_block < 0 || static_cast<std::size_t>(t.partner_block) >= blocks.size())
        throw InvalidMesh(id + " interface refers to an unknown block");
      const auto& pb = blocks[static_cast<std::size_t>(t.partner_block)];
      const auto& back = pb.tag(t.partner_side);
      if (back.kind != BoundaryKind::Interface || back.partner_block != static_cast<int>(b) ||
          back.partner_side != static_cast<Side>(s)) {
        throw InvalidMesh(id + " interface is not mirrored on its partner");
      }
      if (match_sides(blk, static_cast<Side>(s), pb, t.partner_side, tol) == 0)
        throw InvalidMesh(id + " interface nodes do not coincide with the partner side");
    }
  }
}

double MultiblockMesh::max_spacing() const {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, b.max_spacing());
  return m;
}

double MultiblockMesh::min_spacing() const {
  double m = 1e300;
  for (const auto& b : blocks) m = std::min(m, b.min_spacing());
  return m;
}

std::size_t MultiblockMesh::node_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.X.size();
  return n;
}

CurvilinearBlock transfinite_block(const BoundaryCurve& south, const BoundaryCurve& north, const BoundaryCurve& west,
                                   const BoundaryCurve& east, int n_xi, int n_eta) {
  if (n_xi < 2 || n_eta < 2) throw InvalidArgument("transfinite block needs at least 2x2 nodes");
  const Point s0 = south(0.0), s1 = south(1.0), n0 = north(0.0), n1 = north(1.0);
  const double scale = std::max({south.length(), north.length(), west.length(), east.length()});
  require_corner(s0, west(0.0), scale, "south-west");
  require_corner(s1, east(0.0), scale, "south-east");
  require_corner(n0, west(1.0), scale, "north-west");
  require_corner(n1, east(1.0), scale, "north-east");
  CurvilinearBlock b;
  b.n_xi = n_xi;
  b.n_eta = n_eta;
  b.X.resize(static_cast<std::size_t>(n_xi) * n_eta);
  b.Y.resize(b.X.size());
  const auto S = south.sample(n_xi), N = north.sample(n_xi), W = west.sample(n_eta), E = east.sample(n_eta);
  for (int j = 0; j < n_eta; ++j) {
    const double eta = static_cast<double>(j) / (n_eta - 1);
    for (int i = 0; i < n_xi; ++i) {
      const double xi = static_cast<double>(i) / (n_xi - 1);
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      const double x = (1 - xi) * W[sj].x + xi * E[sj].x + (1 - eta) * S[si].x + eta * N[si].x -
                       ((1 - xi) * (1 - eta) * s0.x + xi * (1 - eta) * s1.x + (1 - xi) * eta * n0.x + xi * eta * n1.x);
      const double y = (1 - xi) * W[sj].y + xi * E[sj].y + (1 - eta) * S[si].y + eta * N[si].y -
                       ((1 - xi) * (1 - eta) * s0.y + xi * (1 - eta) * s1.y + (1 - xi) * eta * n0.y + xi * eta * n1.y);
      b.X[b.index(i, j)] = x;
      b.Y[b.index(i, j)] = y;
    }
  }
  for (int i = 0; i < n_xi; ++i) {
    set_side(b, Side::South, i, S[static_cast<std::size_t>(i)]);
    set_side(b, Side::North, i, N[static_cast<std::size_t>(i)]);
  }
  for (int j = 0; j < n_eta; ++j) {
    set_side(b, Side::West, j, W[static_cast<std::size_t>(j)]);
    set_side(b, Side::East, j, E[static_cast<std::size_t>(j)]);
  }
  if (!(b.min_cell_area() > 0.0)) throw InvalidMesh("transfinite block is folded");
  return b;
}

MultiblockMesh annulus_in_rectangle(Point c, double r, double x_min, double x_max, double y_min, double y_max,
                                    double h, const Material& material, BoundaryKind outer, int min_nodes) {
  if (!(r > 0.0) || !(h > 0.0)) throw InvalidArgument("annulus needs positive radius and spacing");
  if (c.x - r <= x_min || c.x + r >= x_max || c.y - r <= y_min || c.y + r >= y_max)
    throw InvalidArgument("cavity touches or exceeds the rectangle");
  if (!(c.y > y_min && c.y < y_max)) throw InvalidArgument("cavity centre outside the rectangle");
  const BoundaryCurve rect = BoundaryCurve::polygon(
      {{x_max, c.y}, {x_max, y_max}, {x_min, y_max}, {x_min, y_min}, {x_max, y_min}});
  int m = intervals_for(rect.length(), h, std::max(8, min_nodes - 1), false);
  m = (m + 3) / 4 * 4;
  std::vector<Point> inner(static_cast<std::size_t>(m) + 1), outer_pts(inner.size());
  double longest = 0.0;
  for (int j = 0; j <= m; ++j) {
    const int jj = j % m;
    const double t = 2.0 * std::numbers::pi * jj / m;
    inner[static_cast<std::size_t>(j)] = {c.x + r * std::cos(t), c.y + r * std::sin(t)};
    outer_pts[static_cast<std::size_t>(j)] = rect(static_cast<double>(jj) / m);
    longest = std::max(longest, dist(inner[static_cast<std::size_t>(j)], outer_pts[static_cast<std::size_t>(j)]));
  }
  const int nr = intervals_for(longest, h, std::max(2, min_nodes - 1), false);
  CurvilinearBlock b;
  b.n_xi = nr + 1;
  b.n_eta = m + 1;
  b.X.resize(static_cast<std::size_t>(b.n_xi) * b.n_eta);
  b.Y.resize(b.X.size());
  for (int j = 0; j <= m; ++j) {
    const Point a = inner[static_cast<std::size_t>(j)], o = outer_pts[static_cast<std::size_t>(j)];
    for (int i = 0; i <= nr; ++i) {
      const double f = static_cast<double>(i) / nr;
      b.X[b.index(i, j)] = i == nr ? o.x : a.x + f * (o.x - a.x);
      b.Y[b.index(i, j)] = i == nr ? o.y : a.y + f * (o.y - a.y);
    }
  }
  b.tag(Side::West) = {BoundaryKind::TractionFree, -1, Side::West};
  b.tag(Side::East) = {outer, -1, Side::West};
  b.tag(Side::South) = {BoundaryKind::Interface, 0, Side::North};
  b.tag(Side::North) = {BoundaryKind::Interface, 0, Side::South};
  MultiblockMesh mesh;
  mesh.blocks.push_back(std::move(b));
  mesh.materials.push_back(material);
  mesh.validate();
  return mesh;
}

MultiblockMesh scene_mesh(const SceneGeometry& scene, double h, int min_nodes) {
  const int min_iv = std::max(2, min_nodes - 1);
  scene.validate();
  if (!(h > 0.0)) throw InvalidArgument("mesh spacing must be positive");
  const double a = scene.cavity_box_half_width;
  for (const auto& c : scene.cavities) {
    if (!(a > c.radius)) throw InvalidArgument("cavity box half width must exceed the cavity radius");
    if (c.centre.x - a <= scene.x_min || c.centre.x + a >= scene.x_max || c.centre.y - a <= scene.y_min ||
        c.centre.y + a >= scene.y_max)
      throw InvalidArgument("cavity box exceeds the scene box");
  }
  // Column and row breakpoints.
  std::vector<double> bx{scene.x_min, scene.x_max};
  std::vector<double> by{scene.y_max};
  for (const auto& c : scene.cavities) {
    bx.push_back(c.centre.x - a);
    bx.push_back(c.centre.x + a);
    by.push_back(c.centre.y - a);
    by.push_back(c.centre.y + a);
  }
  double band_top = scene.y_min;
  if (scene.interface) {
    band_top = *std::min_element(by.begin(), by.end());
  } else {
    by.push_back(scene.y_min);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double p, double q) { return std::abs(p - q) < 1e-12; }), v.end());
  };
  uniq(bx);
  uniq(by);
  // Each cavity box must be exactly one lattice cell.
  auto inside = [](const std::vector<double>& v, double lo, double hi) {
    for (double t : v)
      if (t > lo + 1e-12 && t < hi - 1e-12) return true;
    return false;
  };
  for (const auto& c : scene.cavities) {
    if (inside(bx, c.centre.x - a, c.centre.x + a) || inside(by, c.centre.y - a, c.centre.y + a))
      throw InvalidArgument("cavity boxes must not overlap other cavity boxes in x or y");
  }
  auto cell_count = [&](double lo, double hi) { return intervals_for(hi - lo, h, min_iv, true); };
  std::vector<int> nx(bx.size() - 1), ny(by.size() - 1);
  for (std::size_t k = 0; k + 1 < bx.size(); ++k) {
    nx[k] = cell_count(bx[k], bx[k + 1]);
    if (scene.interface) {
      // The curved interface is sampled uniformly in x; its slope stretches
      // the spacing along the curve.
      CubicSpline f(scene.interface->xs(), scene.interface->ys());
      double stretch = 1.0;
      for (int q = 0; q <= 1000; ++q) {
        const double slope = f.derivative(bx[k] + (bx[k + 1] - bx[k]) * q / 1000.0);
        stretch = std::max(stretch, std::sqrt(1.0 + slope * slope));
      }
      nx[k] = std::max(nx[k], intervals_for((bx[k + 1] - bx[k]) * stretch * 1.001, h, min_iv, true));
    }
  }
  for (std::size_t k = 0; k + 1 < by.size(); ++k) ny[k] = cell_count(by[k], by[k + 1]);

  MultiblockMesh mesh;
  mesh.materials = scene.materials;
  std::vector<std::array<bool, 4>> fixed;
  auto add = [&](CurvilinearBlock b, int material) {
    b.material_id = material;
    mesh.blocks.push_back(std::move(b));
    fixed.push_back({false, false, false, false});
  };
  auto is_box = [&](std::size_t kx, std::size_t ky) {
    for (const auto& c : scene.cavities)
      if (std::abs(bx[kx] - (c.centre.x - a)) < 1e-12 && std::abs(by[ky] - (c.centre.y - a)) < 1e-12) return true;
    return false;
  };
  for (std::size_t ky = 0; ky + 1 < by.size(); ++ky)
    for (std::size_t kx = 0; kx + 1 < bx.size(); ++kx) {
      if (is_box(kx, ky)) continue;
      add(rectangle_block(bx[kx], bx[kx + 1], by[ky], by[ky + 1], nx[kx], ny[ky]), 0);
    }
  for (const auto& c : scene.cavities) {
    const auto kx = static_cast<std::size_t>(std::lower_bound(bx.begin(), bx.end(), c.centre.x - a - 1e-12) - bx.begin());
    const auto ky = static_cast<std::size_t>(std::lower_bound(by.begin(), by.end(), c.centre.y - a - 1e-12) - by.begin());
    const double corner_ray = a * std::numbers::sqrt2 - c.radius;
    const int nr = intervals_for(corner_ray, h, min_iv, false);
    const int mat = scene.interface ? scene.region(c.centre) : 0;
    for (int d = 0; d < 4; ++d) {
      const double t0 = -std::numbers::pi / 4 + d * std::numbers::pi / 2;
      const double t1 = t0 + std::numbers::pi / 2;
      auto corner = [&](double t) {
        return Point{c.centre.x + a * std::numbers::sqrt2 * std::cos(t), c.centre.y + a * std::numbers::sqrt2 * std::sin(t)};
      };
      auto on_arc = [&](double t) { return Point{c.centre.x + c.radius * std::cos(t), c.centre.y + c.radius * std::sin(t)}; };
      // Square corners are snapped to the lattice values to avoid rounding.
      auto snap = [&](Point p) {
        return Point{std::abs(p.x - (c.centre.x + a)) < 1e-9 ? c.centre.x + a : (std::abs(p.x - (c.centre.x - a)) < 1e-9 ? c.centre.x - a : p.x),
                     std::abs(p.y - (c.centre.y + a)) < 1e-9 ? c.centre.y + a : (std::abs(p.y - (c.centre.y - a)) < 1e-9 ? c.centre.y - a : p.y)};
      };
      const Point q0 = snap(corner(t0)), q1 = snap(corner(t1));
      const Point p0 = on_arc(t0), p1 = on_arc(t1);
      CurvilinearBlock b = transfinite_block(BoundaryCurve::segment(p0, q0), BoundaryCurve::segment(p1, q1),
                                             BoundaryCurve::arc(c.centre, c.radius, t0, t1),
                                             BoundaryCurve::segment(q0, q1), nr + 1, (d % 2 == 0 ? ny[ky] : nx[kx]) + 1);
      b.tag(Side::West) = {BoundaryKind::TractionFree, -1, Side::West};
      add(std::move(b), mat);
      fixed.back()[static_cast<std::size_t>(Side::West)] = true;
    }
  }
  if (scene.interface) {
    const auto& f = *scene.interface;
    double band = 0.0, low = 0.0;
    for (int k = 0; k <= 4000; ++k) {
      const double x = scene.x_min + (scene.x_max - scene.x_min) * k / 4000.0;
      const double y = f(x);
      if (!(y > scene.y_min) || !(y < band_top)) throw InvalidArgument("interface curve leaves the band below the cavities");
      band = std::max(band, band_top - y);
      low = std::max(low, y - scene.y_min);
    }
    const int nband = intervals_for(band, h, min_iv, false);
    const int nlow = intervals_for(low, h, min_iv, false);
    for (std::size_t kx = 0; kx + 1 < bx.size(); ++kx) {
      const double x0 = bx[kx], x1 = bx[kx + 1];
      const BoundaryCurve curve = BoundaryCurve::spline_graph(f.xs(), f.ys(), x0, x1);
      const Point c0 = curve(0.0), c1 = curve(1.0);
      add(transfinite_block(curve, BoundaryCurve::segment({x0, band_top}, {x1, band_top}),
                            BoundaryCurve::segment(c0, {x0, band_top}), BoundaryCurve::segment(c1, {x1, band_top}),
                            nx[kx] + 1, nband + 1),
          0);
      add(transfinite_block(BoundaryCurve::segment({x0, scene.y_min}, {x1, scene.y_min}), curve,
                            BoundaryCurve::segment({x0, scene.y_min}, c0), BoundaryCurve::segment({x1, scene.y_min}, c1),
                            nx[kx] + 1, nlow + 1),
          1);
    }
  }
  pair_sides(mesh, fixed, scene.outer);
  mesh.validate();
  return mesh;
}

MultiblockMesh tunnel_scene_mesh(const SceneGeometry& scene, double h, int min_nodes) {
  if (scene.interface) {
    for (const auto& c : scene.cavities)
      if (scene.interface_y(c.centre.x) >= c.centre.y - c.radius)
        throw InvalidArgument("tunnels must lie above the material interface");
  }
  return scene_mesh(scene, h, min_nodes);
}

}  // namespace elastic2d
