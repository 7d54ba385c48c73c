#include "elastic2d/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "elastic2d/cavity_scatter.hpp"
#include "elastic2d/error.hpp"
#include "elastic2d/norms.hpp"
#include "json.hpp"

#ifdef ELASTIC2D_HAVE_OPENMP
#include <omp.h>
#endif

namespace elastic2d {

namespace fs = std::filesystem;
using nlohmann::json;

const char* solver_name(SolverKind k) { return k == SolverKind::Sbp ? "sbp" : "svs"; }

namespace {

const char* layout_name(MeshLayout l) {
  switch (l) {
    case MeshLayout::Scene: return "scene";
    case MeshLayout::Tunnel: return "tunnel";
    case MeshLayout::Ring: return "ring";
  }
  return "?";
}

Point point_of(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(what + " must be a pair [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

BoundaryKind boundary_of(const std::string& s) {
  if (s == "radiation") return BoundaryKind::Radiation;
  if (s == "traction-free") return BoundaryKind::TractionFree;
  if (s == "dirichlet") return BoundaryKind::Dirichlet;
  throw ConfigError("unknown outer boundary '" + s + "' (radiation, traction-free or dirichlet)");
}

Material material_of(const json& j) {
  const double rho = j.value("rho", 1.0);
  try {
    if (j.contains("cp")) return material_from_speeds(j.at("cp").get<double>(), j.at("cs").get<double>(), rho);
    return Material(rho, j.at("lambda").get<double>(), j.at("mu").get<double>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("material needs cp and cs, or lambda and mu: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid material: ") + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

double ExperimentConfig::spacing() const {
  double lambda = wavelength;
  if (!(lambda > 0.0)) {
    double f = f_max;
    if (!(f > 0.0))
      for (const auto& s : sources) f = std::max(f, 2.0 * s.omega);
    if (!(f > 0.0)) throw ConfigError("resolution needs a wavelength, f_max or a source frequency");
    lambda = scene.min_wave_speed() / f;
  }
  return spacing_for_ppw(lambda, ppw);
}

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  try {
    scene.validate();
    for (const auto& s : sources) s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!(ppw > 0.0)) throw ConfigError("ppw must be positive");
  if (!(t_end > 0.0)) throw ConfigError("time.t_end must be positive");
  if (!(sample_interval > 0.0) || sample_interval > t_end) throw ConfigError("time.sample_interval must lie in (0, t_end]");
  const double ratio = t_end / sample_interval;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) throw ConfigError("t_end must be a whole number of sample intervals");
  if (energy_interval < 0.0) throw ConfigError("energy_interval must be non-negative");
  if (!(amplitude_cap > 0.0)) throw ConfigError("amplitude_cap must be positive");
  for (double t : snapshot_times) {
    if (t < 0.0 || t > t_end + 1e-12) throw ConfigError("snapshot time " + std::to_string(t) + " outside [0, t_end]");
    const double k = t / sample_interval;
    if (std::abs(k - std::round(k)) > 1e-6) throw ConfigError("snapshot times must be multiples of the sample interval");
  }
  const auto inside = [&](Point p) {
    return p.x >= scene.x_min && p.x <= scene.x_max && p.y >= scene.y_min && p.y <= scene.y_max;
  };
  for (const auto& r : receivers) {
    if (r.label.empty() || r.label.find_first_of("/\\ \t") != std::string::npos)
      throw ConfigError("receiver labels must be non-empty words");
    if (!inside(r.position)) throw ConfigError("receiver '" + r.label + "' lies outside the scene box");
    for (const auto& c : scene.cavities)
      if (std::hypot(r.position.x - c.centre.x, r.position.y - c.centre.y) < c.radius * (1.0 - 1e-9))
        throw ConfigError("receiver '" + r.label + "' lies inside a cavity");
  }
  for (std::size_t a = 0; a < receivers.size(); ++a)
    for (std::size_t b = a + 1; b < receivers.size(); ++b)
      if (receivers[a].label == receivers[b].label) throw ConfigError("duplicate receiver label '" + receivers[a].label + "'");
  for (const auto& s : sources) {
    if (!inside(s.position) || scene.in_cavity(s.position)) throw ConfigError("source lies outside the solid");
  }
  if (!mesh_file.empty() && !fs::exists(mesh_file)) throw ConfigError("mesh file '" + mesh_file + "' does not exist");
  if (layout == MeshLayout::Ring && (scene.cavities.size() != 1 || scene.interface))
    throw ConfigError("the ring layout needs exactly one cavity and no interface");
  if (svs.sponge_width < 0.0) throw ConfigError("svs.sponge_width must be non-negative");
  if (!(svs_cfl_safety > 0.0 && svs_cfl_safety <= 1.0)) throw ConfigError("svs.cfl_safety must lie in (0, 1]");
  if (!(sbp.cfl_safety > 0.0 && sbp.cfl_safety <= 1.0)) throw ConfigError("sbp.cfl_safety must lie in (0, 1]");
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_directory) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (!j.contains("schema_version")) throw ConfigError("config lacks schema_version");
    c.schema_version = j.at("schema_version").get<int>();
    c.name = get_or<std::string>(j, "name", c.name);
    const auto solver = j.at("solver").get<std::string>();
    if (solver == "sbp") {
      c.solver = SolverKind::Sbp;
    } else if (solver == "svs") {
      c.solver = SolverKind::Svs;
    } else {
      throw ConfigError("solver must be 'sbp' or 'svs'");
    }

    const auto& s = j.at("scene");
    const auto box = s.at("box").get<std::vector<double>>();
    if (box.size() != 4) throw ConfigError("scene.box must be [x_min, x_max, y_min, y_max]");
    c.scene.x_min = box[0];
    c.scene.x_max = box[1];
    c.scene.y_min = box[2];
    c.scene.y_max = box[3];
    c.scene.outer = boundary_of(get_or<std::string>(s, "outer", "radiation"));
    c.scene.cavity_box_half_width = get_or(s, "cavity_box_half_width", c.scene.cavity_box_half_width);
    c.scene.cavities.clear();
    if (s.contains("cavities"))
      for (const auto& cv : s.at("cavities"))
        c.scene.cavities.push_back({point_of(cv.at("centre"), "cavity centre"), cv.at("radius").get<double>()});
    c.scene.materials.clear();
    for (const auto& m : s.at("materials")) c.scene.materials.push_back(material_of(m));
    if (s.contains("interface")) {
      const auto& in = s.at("interface");
      try {
        c.scene.interface.emplace(in.at("x").get<std::vector<double>>(), in.at("y").get<std::vector<double>>());
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("invalid interface: ") + e.what());
      }
    }
    const auto layout = get_or<std::string>(s, "layout", "scene");
    if (layout == "scene") {
      c.layout = MeshLayout::Scene;
    } else if (layout == "tunnel") {
      c.layout = MeshLayout::Tunnel;
    } else if (layout == "ring") {
      c.layout = MeshLayout::Ring;
    } else {
      throw ConfigError("scene.layout must be scene, tunnel or ring");
    }
    if (s.contains("mesh_file")) {
      fs::path p = s.at("mesh_file").get<std::string>();
      if (p.is_relative()) p = fs::path(base_directory) / p;
      c.mesh_file = p.string();
    }

    if (j.contains("resolution")) {
      const auto& r = j.at("resolution");
      c.ppw = get_or(r, "ppw", c.ppw);
      c.wavelength = get_or(r, "wavelength", 0.0);
      c.f_max = get_or(r, "f_max", 0.0);
    }

    const auto& t = j.at("time");
    c.t_end = t.at("t_end").get<double>();
    c.sample_interval = get_or(t, "sample_interval", c.sample_interval);
    c.energy_interval = get_or(t, "energy_interval", c.energy_interval);

    if (j.contains("sources"))
      for (const auto& sj : j.at("sources")) {
        SourceSpec sp;
        sp.position = point_of(sj.at("position"), "source position");
        sp.omega = get_or(sj, "omega", sp.omega);
        sp.amplitude = get_or(sj, "amplitude", sp.amplitude);
        const auto kind = get_or<std::string>(sj, "kind", "dipole");
        if (kind == "dipole") {
          sp.kind = SourceKind::Dipole;
        } else if (kind == "force") {
          sp.kind = SourceKind::Force;
        } else {
          throw ConfigError("source kind must be dipole or force");
        }
        if (sj.contains("direction")) sp.direction = point_of(sj.at("direction"), "source direction");
        c.sources.push_back(sp);
      }
    if (j.contains("receivers"))
      for (const auto& rj : j.at("receivers"))
        c.receivers.push_back({rj.at("label").get<std::string>(), point_of(rj.at("position"), "receiver position")});

    if (j.contains("output")) {
      const auto& o = j.at("output");
      c.snapshot_times = get_or(o, "snapshots", c.snapshot_times);
      c.amplitude_cap = get_or(o, "amplitude_cap", c.amplitude_cap);
    }
    if (j.contains("sbp")) {
      const auto& o = j.at("sbp");
      c.sbp.order = get_or(o, "order", c.sbp.order);
      c.sbp.cfl_safety = get_or(o, "cfl_safety", c.sbp.cfl_safety);
      c.sbp.penalty_safety = get_or(o, "penalty_safety", c.sbp.penalty_safety);
      c.sbp_moment_order = get_or(o, "moment_order", c.sbp_moment_order);
    }
    if (j.contains("svs")) {
      const auto& o = j.at("svs");
      c.air.cp = get_or(o, "air_cp", c.air.cp);
      c.air.density_ratio = get_or(o, "air_density_ratio", c.air.density_ratio);
      c.svs.sponge_width = get_or(o, "sponge_width", c.svs.sponge_width);
      c.svs.sponge_reflection = get_or(o, "sponge_reflection", c.svs.sponge_reflection);
      c.svs_cfl_safety = get_or(o, "cfl_safety", c.svs_cfl_safety);
      c.svs_moment_order = get_or(o, "moment_order", c.svs_moment_order);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), fs::path(path).parent_path().string());
}

MultiblockMesh build_sbp_mesh(const ExperimentConfig& c) {
  if (!c.mesh_file.empty()) return read_mesh(c.mesh_file);
  const double h = c.spacing();
  const int min_nodes = SbpOperators::min_size(c.sbp.order);
  switch (c.layout) {
    case MeshLayout::Ring: {
      const auto& cv = c.scene.cavities.front();
      return annulus_in_rectangle(cv.centre, cv.radius, c.scene.x_min, c.scene.x_max, c.scene.y_min, c.scene.y_max, h,
                                  c.scene.materials.front(), c.scene.outer, min_nodes);
    }
    case MeshLayout::Tunnel: return tunnel_scene_mesh(c.scene, h, min_nodes);
    case MeshLayout::Scene: break;
  }
  return scene_mesh(c.scene, h, min_nodes);
}

CartesianGrid build_svs_grid(const ExperimentConfig& c) {
  const double h = c.spacing();
  const double w = c.svs.sponge_width;
  const long i0 = static_cast<long>(std::floor((c.scene.x_min - w) / h + 1e-9));
  const long i1 = static_cast<long>(std::ceil((c.scene.x_max + w) / h - 1e-9));
  const long j0 = static_cast<long>(std::floor((c.scene.y_min - w) / h + 1e-9));
  const long j1 = static_cast<long>(std::ceil((c.scene.y_max + w) / h - 1e-9));
  CartesianGrid g;
  g.origin = {static_cast<double>(i0) * h, static_cast<double>(j0) * h};
  g.nx = static_cast<int>(i1 - i0 + 1);
  g.ny = static_cast<int>(j1 - j0 + 1);
  g.hx = g.hy = h;
  g.validate();
  return g;
}

const Seismogram& RunResult::seismogram(const std::string& label) const {
  for (const auto& s : seismograms)
    if (s.label == label) return s;
  throw InvalidArgument("run has no receiver '" + label + "'");
}

namespace {

json material_json(const Material& m) {
  return {{"rho", m.rho()}, {"lambda", m.lambda()}, {"mu", m.mu()}, {"cp", m.cp()}, {"cs", m.cs()}};
}

// Solver-independent driver: stepping, sampling, energy log, snapshots.
template <class Solver, class Sample, class Snap>
void drive(Solver& solver, const ExperimentConfig& c, const TimeAxis& axis, Sample sample, Snap snap,
           std::vector<Receiver>& receivers, RunResult& result, const RunOptions& opt,
           const std::function<void(const Snapshot&)>& on_snapshot) {
  const long per_sample = axis.steps_per_sample;
  const long energy_every =
      c.energy_interval > 0.0 ? std::max(1L, std::lround(c.energy_interval / axis.dt)) : 0L;
  std::vector<long> snap_steps;
  for (double t : c.snapshot_times) snap_steps.push_back(std::lround(t / axis.dt));
  auto record = [&](long step) {
    const double t = axis.time(step);
    if (step % per_sample == 0) {
      for (auto& r : receivers) {
        const Point u = sample(r.position());
        r.append(t, u.x, u.y);
        result.max_displacement = std::max({result.max_displacement, std::abs(u.x), std::abs(u.y)});
      }
    }
    if (energy_every > 0 && step % energy_every == 0) {
      result.energy_times.push_back(t);
      result.energy.push_back(solver.energy());
    }
    for (std::size_t k = 0; k < snap_steps.size(); ++k)
      if (snap_steps[k] == step) {
        Snapshot s = snap();
        s.time = c.snapshot_times[k];
        result.max_displacement = std::max(result.max_displacement, s.max_abs("magnitude"));
        result.snapshot_times.push_back(s.time);
        on_snapshot(s);
        if (opt.keep_snapshots) result.snapshots.push_back(std::move(s));
      }
  };
  record(0);
  const long report_every = std::max(1L, axis.n_steps / 10);
  for (long n = 1; n <= axis.n_steps; ++n) {
    solver.step();
    if (n % per_sample == 0 || n == axis.n_steps) {
      solver.check_finite();
    }
    record(n);
    result.steps = n;
    if (result.max_displacement > c.amplitude_cap)
      throw InstabilityError("displacement exceeded the amplitude cap", n);
    if (opt.verbose && n % report_every == 0)
      std::fprintf(stderr, "[%s] step %ld/%ld t=%.3f\n", c.name.c_str(), n, axis.n_steps, axis.time(n));
  }
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, const std::string& directory, const RunOptions& opt) {
  c.validate();
  const auto wall0 = std::chrono::steady_clock::now();
  RunResult result;
  result.directory = directory;
  const fs::path dir(directory);
  if (opt.write_outputs) {
    fs::create_directories(dir / "receivers");
    fs::create_directories(dir / "snapshots");
  }
  json manifest;
  manifest["schema_version"] = c.schema_version;
  manifest["name"] = c.name;
  manifest["solver"] = solver_name(c.solver);
  manifest["h"] = c.spacing();
  manifest["ppw"] = c.ppw;
  manifest["t_end"] = c.t_end;
  manifest["sample_interval"] = c.sample_interval;
  manifest["materials"] = json::array();
  for (const auto& m : c.scene.materials) manifest["materials"].push_back(material_json(m));
  manifest["sources"] = json::array();
  for (const auto& s : c.sources)
    manifest["sources"].push_back({{"kind", s.kind == SourceKind::Dipole ? "dipole" : "force"},
                                   {"position", {s.position.x, s.position.y}},
                                   {"direction", {s.direction.x, s.direction.y}},
                                   {"omega", s.omega},
                                   {"amplitude", s.amplitude}});

  std::vector<Receiver> receivers;
  for (const auto& r : c.receivers) receivers.emplace_back(r.label, r.position);
  bool geometry_written = false;
  auto on_snapshot = [&](const Snapshot& s) {
    if (!opt.write_outputs) return;
    char stem[64];
    std::snprintf(stem, sizeof stem, "t%08.4f", s.time);
    write_snapshot(s, (dir / "snapshots").string(), stem, "geometry.bin", !geometry_written);
    geometry_written = true;
  };

  auto finish = [&]() {
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    for (const auto& r : receivers) result.seismograms.push_back(to_seismogram(r));
    // Seismograms need a dt even when the run stopped after one sample.
    for (auto& s : result.seismograms)
      if (s.dt == 0.0) s.dt = c.sample_interval;
    if (!opt.write_outputs) return;
    for (const auto& s : result.seismograms) write_seismogram(s, (dir / "receivers" / (s.label + ".csv")).string());
    {
      std::FILE* f = std::fopen((dir / "energy.csv").string().c_str(), "w");
      if (!f) throw Error("cannot write energy.csv");
      std::fprintf(f, "t,energy\n");
      for (std::size_t k = 0; k < result.energy.size(); ++k)
        std::fprintf(f, "%.17g,%.17g\n", result.energy_times[k], result.energy[k]);
      std::fclose(f);
    }
    manifest["dt"] = result.dt;
    manifest["steps"] = result.steps;
    manifest["unknowns"] = result.unknowns;
    manifest["status"] = result.stable ? "ok" : "unstable";
    if (!result.stable) manifest["message"] = result.message;
    manifest["max_displacement"] = result.max_displacement;
    manifest["snapshot_times"] = result.snapshot_times;
    manifest["wall_seconds"] = result.wall_seconds;
    std::ofstream os(dir / "manifest.json");
    os << manifest.dump(2) << "\n";
  };

  try {
    if (c.solver == SolverKind::Sbp) {
      SbpSolver solver(build_sbp_mesh(c), c.sbp);
      const auto& mesh = solver.mesh();
      result.unknowns = 2 * mesh.node_count();
      json blocks = json::array();
      for (const auto& b : mesh.blocks)
        blocks.push_back({{"n_xi", b.n_xi}, {"n_eta", b.n_eta}, {"material", b.material_id}});
      manifest["mesh"] = {{"layout", c.mesh_file.empty() ? layout_name(c.layout) : "file"},
                          {"blocks", blocks},
                          {"nodes", mesh.node_count()},
                          {"min_spacing", mesh.min_spacing()},
                          {"max_spacing", mesh.max_spacing()}};
      json pen = json::array();
      for (const auto& p : solver.penalties())
        pen.push_back({{"block", p.block},
                       {"side", side_name(p.side)},
                       {"kind", boundary_kind_name(p.kind)},
                       {"tau_min", p.tau_min},
                       {"tau_max", p.tau_max}});
      manifest["penalties"] = pen;
      manifest["sbp"] = {{"order", c.sbp.order},
                         {"cfl_safety", c.sbp.cfl_safety},
                         {"penalty_safety", c.sbp.penalty_safety},
                         {"moment_order", c.sbp_moment_order}};
      for (auto s : c.sources) {
        s.moment_order = c.sbp_moment_order;
        attach_sbp_source(solver, s);
      }
      const TimeAxis axis = TimeAxis::fit(0.0, c.t_end, solver.stable_time_step(), c.sample_interval);
      result.dt = axis.dt;
      solver.start(0.0, axis.dt);
      drive(
          solver, c, axis, [&](Point p) { return solver.sample(p); }, [&]() { return snapshot_from_sbp(solver); },
          receivers, result, opt, on_snapshot);
    } else {
      const CartesianGrid grid = build_svs_grid(c);
      SvsSolver solver(rasterize_scene(c.scene, grid, c.air), c.svs);
      result.unknowns = 5 * static_cast<std::size_t>(grid.nx) * grid.ny;
      manifest["grid"] = {{"origin", {grid.origin.x, grid.origin.y}}, {"nx", grid.nx}, {"ny", grid.ny}, {"h", grid.hx}};
      manifest["svs"] = {{"air_cp", c.air.cp},
                         {"air_density_ratio", c.air.density_ratio},
                         {"sponge_width", c.svs.sponge_width},
                         {"sponge_reflection", c.svs.sponge_reflection},
                         {"cfl_safety", c.svs_cfl_safety},
                         {"moment_order", c.svs_moment_order},
                         {"max_p_speed", raster_max_p_speed(solver.raster())}};
      for (auto s : c.sources) {
        s.moment_order = c.svs_moment_order;
        solver.add_source(s);
      }
      const TimeAxis axis = TimeAxis::fit(0.0, c.t_end, cfl_dt(solver.raster(), c.svs_cfl_safety), c.sample_interval);
      result.dt = axis.dt;
      solver.start(0.0, axis.dt);
      std::vector<SvsSolver::Probe> probes;
      for (const auto& r : c.receivers) probes.push_back(solver.probe(r.position));
      // Receivers are visited in config order, so a counter maps them to probes.
      std::size_t next = 0;
      drive(
          solver, c, axis,
          [&](Point) {
            const Point u = solver.read(probes[next]);
            next = (next + 1) % probes.size();
            return u;
          },
          [&]() { return snapshot_from_svs(solver); }, receivers, result, opt, on_snapshot);
    }
  } catch (const InstabilityError& e) {
    result.stable = false;
    result.message = e.what();
  }
  finish();
  return result;
}

double VerificationResult::max_error() const {
  double m = 0.0;
  for (double e : errors) m = std::max(m, e);
  return m;
}

VerificationResult run_verification(const VerificationOptions& o) {
  const auto wall0 = std::chrono::steady_clock::now();
  CavityScatterParams cp;
  cp.radius = o.radius;
  const CavityScatter exact(cp);
  VerificationResult res;
  res.modes = exact.modes();
  res.h = spacing_for_ppw(cp.s_wavelength, o.ppw);

  SceneGeometry scene;
  scene.x_min = o.x_min;
  scene.x_max = o.x_max;
  scene.y_min = o.y_min;
  scene.y_max = o.y_max;
  scene.cavities = {{cp.centre, cp.radius}};
  scene.materials = {cp.material()};
  scene.outer = BoundaryKind::Dirichlet;
  scene.cavity_box_half_width = 1.8 * o.radius;
  SbpOptions so;
  so.order = o.order;
  so.cfl_safety = o.cfl_safety;
  SbpSolver solver(scene_mesh(scene, res.h, SbpOperators::min_size(o.order)), so);
  const auto& mesh = solver.mesh();
  res.nodes = mesh.node_count();

  // The field is time harmonic: one complex amplitude per node suffices.
  std::vector<std::vector<std::array<CavityScatter::Complex, 2>>> amp(mesh.blocks.size());
  for (std::size_t b = 0; b < mesh.blocks.size(); ++b) {
    const auto& blk = mesh.blocks[b];
    amp[b].resize(blk.X.size());
    for (std::size_t k = 0; k < blk.X.size(); ++k) amp[b][k] = exact.amplitude(blk.X[k], blk.Y[k]);
  }
  const double w = exact.omega();
  solver.set_dirichlet_data([&](int b, std::size_t k, double t, int td) {
    return CavityScatter::evaluate(amp[static_cast<std::size_t>(b)][k], w, t, td);
  });
  res.dt = solver.stable_time_step();
  const long n = static_cast<long>(std::ceil(o.t_end / res.dt - 1e-9));
  res.dt = o.t_end / static_cast<double>(n);
  solver.start(0.0, res.dt, [&](int b, std::size_t k, double t) {
    return CavityScatter::evaluate(amp[static_cast<std::size_t>(b)][k], w, t, 0);
  });

  std::vector<double> nu, nv, ru, rv;
  nu.reserve(res.nodes);
  for (long s = 1; s <= n; ++s) {
    solver.step();
    const double t = solver.time();
    nu.clear();
    nv.clear();
    ru.clear();
    rv.clear();
    for (std::size_t b = 0; b < mesh.blocks.size(); ++b) {
      const auto& f = solver.displacement()[b];
      for (std::size_t k = 0; k < amp[b].size(); ++k) {
        const Point e = CavityScatter::evaluate(amp[b][k], w, t, 0);
        nu.push_back(f.u.data()[k]);
        nv.push_back(f.v.data()[k]);
        ru.push_back(e.x);
        rv.push_back(e.y);
      }
    }
    res.times.push_back(t);
    res.errors.push_back(relative_max_error(nu, nv, ru, rv));
    if (o.verbose && s % std::max(1L, n / 20) == 0)
      std::fprintf(stderr, "[verify] t=%.3f relative max error %.3e\n", t, res.errors.back());
    if (!std::isfinite(res.errors.back())) throw InstabilityError("verification run blew up", s);
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return res;
}

void write_verification(const VerificationResult& r, const std::string& directory) {
  fs::create_directories(directory);
  std::FILE* f = std::fopen((fs::path(directory) / "verification_error.csv").string().c_str(), "w");
  if (!f) throw Error("cannot write verification_error.csv");
  std::fprintf(f, "t,relative_max_error\n");
  for (std::size_t k = 0; k < r.times.size(); ++k) std::fprintf(f, "%.17g,%.17g\n", r.times[k], r.errors[k]);
  std::fclose(f);
  json m = {{"h", r.h},       {"dt", r.dt}, {"nodes", r.nodes}, {"modes", r.modes}, {"max_error", r.max_error()},
            {"steps", r.times.size()}, {"wall_seconds", r.wall_seconds}};
  std::ofstream os(fs::path(directory) / "manifest.json");
  os << m.dump(2) << "\n";
}

std::string output_root(const std::string& fallback) {
  const char* env = std::getenv("ELASTIC2D_OUTPUT_DIR");
  return env && *env ? std::string(env) : fallback;
}

int apply_thread_override() {
  const char* env = std::getenv("ELASTIC2D_THREADS");
#ifdef ELASTIC2D_HAVE_OPENMP
  if (env && *env) {
    const int n = std::atoi(env);
    if (n < 1) throw ConfigError("ELASTIC2D_THREADS must be a positive integer");
    omp_set_num_threads(n);
  }
  return omp_get_max_threads();
#else
  if (env && *env && std::atoi(env) < 1) throw ConfigError("ELASTIC2D_THREADS must be a positive integer");
  return 1;
#endif
}

}  // namespace elastic2d
