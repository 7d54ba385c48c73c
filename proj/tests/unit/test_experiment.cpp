#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "elastic2d/compare.hpp"
#include "elastic2d/error.hpp"
#include "elastic2d/experiment.hpp"
#include "elastic2d/snapshot.hpp"
#include "json.hpp"

using namespace elastic2d;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json small_config(const std::string& solver) {
  return json::parse(R"({
    "schema_version": 1,
    "name": "small",
    "solver": ")" + solver + R"(",
    // comments are allowed
    "scene": {"box": [-3, 3, -3, 3], "outer": "radiation", "cavity_box_half_width": 1.7,
              "cavities": [{"centre": [0, 0], "radius": 1}],
              "materials": [{"cp": 1.0, "cs": 0.5, "rho": 1.0}]},
    "resolution": {"ppw": 3, "wavelength": 0.5},
    "time": {"t_end": 1.0, "sample_interval": 0.05, "energy_interval": 0.25},
    "sources": [{"kind": "dipole", "position": [-2, 1.5], "omega": 2.0}],
    "receivers": [{"label": "N", "position": [0, 1.3]}, {"label": "W", "position": [-1.3, 0]}],
    "output": {"snapshots": [0.5, 1.0]},
    "sbp": {"order": 6},
    "svs": {"sponge_width": 0.5}
  })", nullptr, true, true);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path fresh(const std::string& name) {
  auto p = fs::temp_directory_path() / ("elastic2d_exp_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parsing fills the scene") {
  const auto c = parse_config(small_config("sbp").dump());
  CHECK(c.solver == SolverKind::Sbp);
  CHECK(c.scene.cavities.size() == 1);
  CHECK(c.scene.outer == BoundaryKind::Radiation);
  CHECK(c.sbp.order == 6);
  CHECK(c.spacing() == doctest::Approx(0.5 / 3));
  CHECK(c.receivers.size() == 2);
  CHECK(c.snapshot_times.size() == 2);
}

TEST_CASE("spacing follows from the source frequency") {
  auto j = small_config("sbp");
  j["resolution"] = {{"ppw", 12}};
  const auto c = parse_config(j.dump());
  // S speed 0.5 at twice the source frequency
  CHECK(c.spacing() == doctest::Approx(0.5 / 4.0 / 12.0));
}

TEST_CASE("invalid configs are rejected with a message") {
  const std::vector<std::pair<std::string, json>> edits{
      {"/schema_version", 2},
      {"/solver", "fem"},
      {"/scene/outer", "open"},
      {"/time/t_end", -1.0},
      {"/time/sample_interval", 0.3},
      {"/receivers/0/position", json::array({0.1, 0.1})},
      {"/receivers/1/label", "N"},
      {"/sources/0/position", json::array({9, 9})},
      {"/sources/0/omega", 0.0},
      {"/output/snapshots", json::array({0.52})},
      {"/scene/materials/0/cs", 2.0},
      {"/svs/sponge_width", -1.0},
  };
  for (const auto& [ptr, value] : edits) {
    auto j = small_config("svs");
    j[json::json_pointer(ptr)] = value;
    CAPTURE(ptr);
    CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
  }
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"solver": "sbp"})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("both solvers run the small scene and write their outputs") {
  for (const std::string solver : {"sbp", "svs"}) {
    CAPTURE(solver);
    const auto c = parse_config(small_config(solver).dump());
    const auto dir = fresh(solver);
    RunOptions o;
    o.keep_snapshots = true;
    const auto r = run_experiment(c, dir.string(), o);
    REQUIRE(r.stable);
    CHECK(r.seismograms.size() == 2);
    CHECK(r.seismogram("N").size() == 21);
    CHECK(r.snapshots.size() == 2);
    CHECK(r.snapshot_times[1] == doctest::Approx(1.0));
    CHECK(r.max_displacement > 0.0);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "energy.csv"));
    CHECK(fs::exists(dir / "receivers" / "N.csv"));
    const auto loaded = load_run_seismograms(dir.string());
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].ux == r.seismogram(loaded[0].label).ux);
    const auto snap = read_snapshot((dir / "snapshots" / "t001.0000.txt").string());
    CHECK(snap.time == doctest::Approx(1.0));
    const auto manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("solver") == solver);
  }
}

TEST_CASE("a zero amplitude source leaves every trace at zero") {
  auto j = small_config("sbp");
  j["sources"][0]["amplitude"] = 0.0;
  const auto c = parse_config(j.dump());
  RunOptions o;
  o.write_outputs = false;
  const auto r = run_experiment(c, "", o);
  for (const auto& s : r.seismograms) {
    for (double v : s.ux) CHECK(v == 0.0);
    for (double v : s.uy) CHECK(v == 0.0);
  }
}

TEST_CASE("runs are deterministic") {
  const auto c = parse_config(small_config("svs").dump());
  const auto a = fresh("det_a"), b = fresh("det_b");
  run_experiment(c, a.string());
  run_experiment(c, b.string());
  CHECK(slurp(a / "receivers" / "N.csv") == slurp(b / "receivers" / "N.csv"));
  CHECK(slurp(a / "energy.csv") == slurp(b / "energy.csv"));
}

TEST_CASE("instability is reported, not thrown") {
  auto j = small_config("svs");
  j["svs"]["cfl_safety"] = 1.0;
  j["output"]["amplitude_cap"] = 1e-12;
  const auto c = parse_config(j.dump());
  RunOptions o;
  o.write_outputs = false;
  const auto r = run_experiment(c, "", o);
  CHECK_FALSE(r.stable);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("environment overrides") {
  setenv("ELASTIC2D_OUTPUT_DIR", "/tmp/elsewhere", 1);
  CHECK(output_root("runs") == "/tmp/elsewhere");
  unsetenv("ELASTIC2D_OUTPUT_DIR");
  CHECK(output_root("runs") == "runs");
  setenv("ELASTIC2D_THREADS", "1", 1);
  CHECK(apply_thread_override() == 1);
  setenv("ELASTIC2D_THREADS", "zero", 1);
  CHECK_THROWS_AS(apply_thread_override(), ConfigError);
  unsetenv("ELASTIC2D_THREADS");
}

}
