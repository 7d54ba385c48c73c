#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elastic2d/mesh.hpp"
#include "elastic2d/sbp_solver.hpp"
#include "elastic2d/scene.hpp"
#include "elastic2d/seismogram.hpp"
#include "elastic2d/snapshot.hpp"
#include "elastic2d/sources.hpp"
#include "elastic2d/svs_solver.hpp"

namespace elastic2d {

inline constexpr int kConfigSchemaVersion = 1;

enum class SolverKind { Sbp, Svs };
/// How the SBP mesh is built from the scene.
enum class MeshLayout { Scene, Tunnel, Ring };

struct ReceiverSpec {
  std::string label;
  Point position;
};

/// A declarative experiment; see configs/ and the README for the JSON
/// schema.
struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "experiment";
  SolverKind solver = SolverKind::Sbp;
  SceneGeometry scene;
  MeshLayout layout = MeshLayout::Scene;
  /// Precomputed SBP mesh; replaces the generated one when set.
  std::string mesh_file;

  /// Resolution rule: h = wavelength / ppw. Without an explicit wavelength
  /// it is the slowest wave speed over f_max, and f_max defaults to twice
  /// the largest source frequency.
  double ppw = 12.0;
  double wavelength = 0.0;
  double f_max = 0.0;

  double t_end = 1.0;
  double sample_interval = 0.01;
  /// Energy is logged every this many time units (zero disables).
  double energy_interval = 0.1;
  std::vector<double> snapshot_times;
  std::vector<SourceSpec> sources;
  std::vector<ReceiverSpec> receivers;
  /// Displacements above this abort the run as unstable.
  double amplitude_cap = 1e6;

  SbpOptions sbp;
  int sbp_moment_order = 7;
  AirProperties air;
  SvsOptions svs{1.0, 1e-4};
  double svs_cfl_safety = 0.9;
  int svs_moment_order = 3;

  double spacing() const;
  /// Throws ConfigError with a description of the first problem found.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_directory = ".");
ExperimentConfig load_config(const std::string& path);

/// SBP mesh of a config (generated from the scene or read from mesh_file).
MultiblockMesh build_sbp_mesh(const ExperimentConfig& config);
/// S-VS lattice: the scene box grown by the sponge width, with nodes on
/// integer multiples of h so that the origin is a node.
CartesianGrid build_svs_grid(const ExperimentConfig& config);

struct RunOptions {
  bool write_outputs = true;
  bool keep_snapshots = false;
  bool verbose = false;
};

struct RunResult {
  std::string directory;
  bool stable = true;
  std::string message;
  double dt = 0.0;
  long steps = 0;
  std::size_t unknowns = 0;
  double wall_seconds = 0.0;
  double max_displacement = 0.0;
  std::vector<Seismogram> seismograms;
  std::vector<double> energy_times;
  std::vector<double> energy;
  std::vector<double> snapshot_times;
  std::vector<Snapshot> snapshots;  ///< filled when keep_snapshots is set

  const Seismogram& seismogram(const std::string& label) const;
};

/// Runs one experiment and writes manifest.json, receivers/<label>.csv,
/// energy.csv and snapshots/ below `directory`. Instability is reported
/// through `stable` with the outputs recorded so far kept.
RunResult run_experiment(const ExperimentConfig& config, const std::string& directory, const RunOptions& options = {});

/// The cavity verification: SBP run started from the analytic scattered
/// plane wave, with the analytic field as Dirichlet data on the box.
struct VerificationOptions {
  double x_min = -5.9, x_max = 3.6, y_min = -3.9, y_max = 3.9;
  double radius = 1.0;
  double ppw = 12.0;
  double t_end = 2.5;
  int order = 8;
  double cfl_safety = 0.9;
  bool verbose = false;
};

struct VerificationResult {
  double h = 0.0;
  double dt = 0.0;
  std::size_t nodes = 0;
  int modes = 0;
  double wall_seconds = 0.0;
  std::vector<double> times;
  std::vector<double> errors;  ///< relative max error after every step
  double max_error() const;
};

VerificationResult run_verification(const VerificationOptions& options);
void write_verification(const VerificationResult& result, const std::string& directory);

/// Output root: ELASTIC2D_OUTPUT_DIR when set, else `fallback`.
std::string output_root(const std::string& fallback);
/// Applies ELASTIC2D_THREADS to the OpenMP runtime; returns the thread
/// count in effect.
int apply_thread_override();

const char* solver_name(SolverKind k);

}  // namespace elastic2d
