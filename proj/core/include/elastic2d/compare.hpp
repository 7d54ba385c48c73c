#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elastic2d/seismogram.hpp"

namespace elastic2d {

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

/// Per-receiver comparison of run A against run B.
struct ReceiverComparison {
  std::string label;
  double arrival_a = 0.0;
  double arrival_b = 0.0;
  /// |arrival_a - arrival_b| / arrival_a: the arrival difference as a
  /// fraction of the travel time (the source starts at t = 0).
  double arrival_relative_delta = 0.0;
  /// Windowed trace energies (sum u^2 dt) per channel.
  double energy_a_ux = 0.0, energy_b_ux = 0.0;
  double energy_a_uy = 0.0, energy_b_uy = 0.0;
  /// max |a - b| over the window divided by max |a| over the window.
  double max_difference = 0.0;
  /// Least-squares factor s minimising |a - s b| over the window.
  double best_fit_scale = 1.0;
  /// One run carries at least four times the windowed energy of the other.
  bool energy_only_in_a = false;
  bool energy_only_in_b = false;
};

struct ComparisonReport {
  TimeWindow window;
  double threshold = 0.02;
  std::vector<ReceiverComparison> receivers;

  const ReceiverComparison& at(const std::string& label) const;
  std::string to_text() const;
  std::string to_json() const;
};

/// Compares the receivers present in both runs. Run B is resampled onto
/// the sampling of A when the intervals differ. Throws InvalidArgument
/// when no receiver label is shared. The window defaults to the common
/// time span.
ComparisonReport compare_runs(const std::vector<Seismogram>& a, const std::vector<Seismogram>& b,
                              std::optional<TimeWindow> window = std::nullopt, double threshold = 0.02);

/// Reads every receivers/*.csv below a run directory, sorted by label.
std::vector<Seismogram> load_run_seismograms(const std::string& run_directory);

}  // namespace elastic2d
