#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "elastic2d/error.hpp"
#include "elastic2d/mesh.hpp"
#include "binary_io.hpp"

namespace elastic2d {

namespace {

std::string tag_text(const BoundaryTag& t) {
  if (t.kind != BoundaryKind::Interface) return boundary_kind_name(t.kind);
  return std::string("interface:") + std::to_string(t.partner_block) + ":" + side_name(t.partner_side);
}

BoundaryTag parse_tag(const std::string& s) {
  if (s == "traction-free") return {BoundaryKind::TractionFree, -1, Side::West};
  if (s == "radiation") return {BoundaryKind::Radiation, -1, Side::West};
  if (s == "dirichlet") return {BoundaryKind::Dirichlet, -1, Side::West};
  if (s.rfind("interface:", 0) == 0) {
    const auto rest = s.substr(10);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw ConfigError("malformed interface tag '" + s + "'");
    try {
      return {BoundaryKind::Interface, std::stoi(rest.substr(0, colon)), side_from_name(rest.substr(colon + 1))};
    } catch (const std::logic_error&) {
      throw ConfigError("malformed interface tag '" + s + "'");
    }
  }
  throw ConfigError("unknown boundary tag '" + s + "'");
}

}  // namespace

void write_mesh(const MultiblockMesh& mesh, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << "elastic2d-mesh 1\n";
  os << "materials " << mesh.materials.size() << "\n";
  os << std::setprecision(17);
  for (std::size_t m = 0; m < mesh.materials.size(); ++m) {
    const auto& mat = mesh.materials[m];
    os << "material " << m << " rho " << mat.rho() << " lambda " << mat.lambda() << " mu " << mat.mu() << "\n";
  }
  os << "blocks " << mesh.blocks.size() << "\n";
  for (std::size_t b = 0; b < mesh.blocks.size(); ++b) {
    const auto& blk = mesh.blocks[b];
    os << "block " << b << " " << blk.n_xi << " " << blk.n_eta << " material " << blk.material_id;
    for (int s = 0; s < 4; ++s) os << " " << side_name(static_cast<Side>(s)) << " " << tag_text(blk.tags[static_cast<std::size_t>(s)]);
    os << "\n";
  }
  os << "end_header\n";
  for (const auto& blk : mesh.blocks) {
    write_le(os, blk.X);
    write_le(os, blk.Y);
  }
  if (!os) throw Error("failed writing mesh '" + path + "'");
}

MultiblockMesh read_mesh(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open mesh file '" + path + "'");
  std::string line;
  std::getline(is, line);
  if (line != "elastic2d-mesh 1") throw ConfigError("'" + path + "' is not an elastic2d mesh file");
  MultiblockMesh mesh;
  while (std::getline(is, line)) {
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "materials" || key == "blocks") continue;
    if (key == "material") {
      std::size_t id;
      std::string k1, k2, k3;
      double rho, lambda, mu;
      if (!(ls >> id >> k1 >> rho >> k2 >> lambda >> k3 >> mu) || id != mesh.materials.size())
        throw ConfigError("malformed material line in mesh header");
      mesh.materials.emplace_back(rho, lambda, mu);
    } else if (key == "block") {
      std::size_t id;
      CurvilinearBlock b;
      std::string mk;
      if (!(ls >> id >> b.n_xi >> b.n_eta >> mk >> b.material_id) || id != mesh.blocks.size() || mk != "material")
        throw ConfigError("malformed block line in mesh header");
      for (int s = 0; s < 4; ++s) {
        std::string side, tag;
        if (!(ls >> side >> tag)) throw ConfigError("block line is missing boundary tags");
        b.tag(side_from_name(side)) = parse_tag(tag);
      }
      if (b.n_xi < 2 || b.n_eta < 2) throw ConfigError("mesh block needs at least 2x2 nodes");
      mesh.blocks.push_back(std::move(b));
    } else {
      throw ConfigError("unknown mesh header line '" + line + "'");
    }
  }
  if (line != "end_header") throw ConfigError("mesh header not terminated");
  for (auto& b : mesh.blocks) {
    b.X.resize(static_cast<std::size_t>(b.n_xi) * b.n_eta);
    b.Y.resize(b.X.size());
    read_le(is, b.X);
    read_le(is, b.Y);
  }
  try {
    mesh.validate();
  } catch (const InvalidMesh& e) {
    throw ConfigError(std::string("mesh file '") + path + "' is invalid: " + e.what());
  }
  return mesh;
}

}  // namespace elastic2d
