#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "elastic2d/compare.hpp"
#include "elastic2d/error.hpp"
#include "elastic2d/experiment.hpp"
#include "elastic2d/mesh.hpp"
#include "elastic2d/snapshot.hpp"

namespace fs = std::filesystem;
using namespace elastic2d;

namespace {

// Exit codes: 0 success, 1 bad input, 2 instability, 3 failed acceptance.
constexpr int kBadInput = 1;
constexpr int kUnstable = 2;
constexpr int kFailed = 3;

int cmd_run(const std::string& config_path, const std::string& out_opt, bool verbose) {
  const auto config = load_config(config_path);
  const fs::path dir = fs::path(output_root(out_opt)) / config.name;
  RunOptions opt;
  opt.verbose = verbose;
  const auto r = run_experiment(config, dir.string(), opt);
  std::printf("%s: solver %s, dt %.6g, %ld steps, %.1f s, outputs in %s\n", config.name.c_str(),
              solver_name(config.solver), r.dt, r.steps, r.wall_seconds, dir.string().c_str());
  if (!r.stable) {
    std::fprintf(stderr, "unstable: %s\n", r.message.c_str());
    return kUnstable;
  }
  return 0;
}

int cmd_verify(double t_end, double ppw, double tolerance, const std::string& out_opt, bool verbose) {
  VerificationOptions o;
  o.t_end = t_end;
  o.ppw = ppw;
  o.verbose = verbose;
  const auto r = run_verification(o);
  const fs::path dir = fs::path(output_root(out_opt)) / "verification";
  write_verification(r, dir.string());
  std::printf("verification: h %.6g, dt %.6g, %zu nodes, %d modes, %zu steps, %.1f s\n", r.h, r.dt, r.nodes, r.modes,
              r.times.size(), r.wall_seconds);
  std::printf("max relative error %.4e (tolerance %.4g) -> %s\n", r.max_error(), tolerance,
              r.max_error() <= tolerance ? "PASS" : "FAIL");
  return r.max_error() <= tolerance ? 0 : kFailed;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& window, double threshold, bool as_json) {
  std::optional<TimeWindow> w;
  if (!window.empty()) {
    TimeWindow tw;
    if (std::sscanf(window.c_str(), "%lf,%lf", &tw.begin, &tw.end) != 2 || !(tw.end > tw.begin))
      throw ConfigError("--window expects a,b with a < b");
    w = tw;
  }
  const auto rep = compare_runs(load_run_seismograms(a), load_run_seismograms(b), w, threshold);
  std::cout << (as_json ? rep.to_json() + "\n" : rep.to_text());
  return 0;
}

int cmd_mesh(const std::string& config_path, const std::string& output) {
  const auto config = load_config(config_path);
  const auto mesh = build_sbp_mesh(config);
  mesh.validate();
  const std::string path = output.empty() ? config.name + ".mesh" : output;
  write_mesh(mesh, path);
  std::printf("%s: %zu blocks, %zu nodes, spacing [%.4g, %.4g]\n", path.c_str(), mesh.blocks.size(), mesh.node_count(),
              mesh.min_spacing(), mesh.max_spacing());
  return 0;
}

int cmd_render(const std::string& snapshot, const std::string& field, const std::string& output, int pixels) {
  const auto snap = read_snapshot(snapshot);
  std::string path = output;
  if (path.empty()) path = fs::path(snapshot).replace_extension("").string() + "_" + field + ".ppm";
  render_ppm(snap, field, path, pixels);
  std::printf("%s (t = %.4g, max |%s| = %.4g)\n", path.c_str(), snap.time, field.c_str(), snap.max_abs(field));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic wave propagation with SBP-SAT and staggered velocity-stress finite differences"};
  app.require_subcommand(1);
  std::string out = "runs";
  bool verbose = false;
  app.add_option("-o,--output", out, "Output root (ELASTIC2D_OUTPUT_DIR overrides)");
  app.add_flag("-v,--verbose", verbose, "Progress on stderr");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  double t_end = 2.5, ppw = 12.0, tolerance = 0.01;
  auto* verify = app.add_subcommand("verify", "Cavity verification against the analytic scattered wave");
  verify->add_option("--t-end", t_end, "Final time (10 for the full run)");
  verify->add_option("--ppw", ppw, "Points per S wavelength");
  verify->add_option("--tolerance", tolerance, "Bound on the relative max error");

  std::string run_a, run_b, window;
  double threshold = 0.02;
  bool as_json = false;
  auto* compare = app.add_subcommand("compare", "Compare the seismograms of two runs");
  compare->add_option("runA", run_a)->required()->check(CLI::ExistingDirectory);
  compare->add_option("runB", run_b)->required()->check(CLI::ExistingDirectory);
  compare->add_option("--window", window, "Time window a,b");
  compare->add_option("--threshold", threshold, "First-arrival threshold (fraction of the peak)");
  compare->add_flag("--json", as_json, "JSON report");

  std::string mesh_out;
  auto* mesh = app.add_subcommand("mesh", "Write the SBP mesh of a scene config");
  mesh->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  mesh->add_option("--out", mesh_out, "Mesh file (default <name>.mesh)");

  std::string snapshot, field = "ux", image_out;
  int pixels = 800;
  auto* render = app.add_subcommand("render", "Render a snapshot as a grayscale PPM");
  render->add_option("snapshot", snapshot, "Snapshot .txt or .bin")->required()->check(CLI::ExistingFile);
  render->add_option("--field", field, "ux, uy or magnitude")->check(CLI::IsMember({"ux", "uy", "magnitude"}));
  render->add_option("--out", image_out, "Image path");
  render->add_option("--pixels", pixels, "Longer image side")->check(CLI::Range(2, 20000));

  CLI11_PARSE(app, argc, argv);
  try {
    apply_thread_override();
    if (*run) return cmd_run(config_path, out, verbose);
    if (*verify) return cmd_verify(t_end, ppw, tolerance, out, verbose);
    if (*compare) return cmd_compare(run_a, run_b, window, threshold, as_json);
    if (*mesh) return cmd_mesh(config_path, mesh_out);
    if (*render) return cmd_render(snapshot, field, image_out, pixels);
  } catch (const InstabilityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUnstable;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  }
  return 0;
}
