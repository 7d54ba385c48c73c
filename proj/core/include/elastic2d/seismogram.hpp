#pragma once

#include <span>
#include <string>
#include <vector>

#include "elastic2d/grid.hpp"

namespace elastic2d {

/// Displacement recording at one receiver, uniformly sampled from t0.
struct Seismogram {
  std::string label;
  Point position;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> ux;
  std::vector<double> uy;

  std::size_t size() const noexcept { return ux.size(); }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  /// Equal trace lengths and dt > 0 (unless empty).
  void validate() const;
  /// |u| at every sample.
  std::vector<double> magnitude() const;
};

Seismogram to_seismogram(const Receiver& receiver);

/// CSV with a '#' header line carrying label, position and dt, then rows
/// t,ux,uy printed with 17 significant digits.
void write_seismogram(const Seismogram& s, const std::string& path);
Seismogram read_seismogram(const std::string& path);

/// Earliest time at which |trace| exceeds threshold * max|trace|. Throws
/// InvalidArgument for an all-zero trace.
double first_arrival(std::span<const double> trace, double t0, double dt, double threshold = 0.02);
/// Arrival of the displacement magnitude.
double first_arrival(const Seismogram& s, double threshold = 0.02);

/// Sum of trace^2 dt over samples with t in [a, b].
double window_energy(std::span<const double> trace, double t0, double dt, double a, double b);

/// Value at time t by 7-point Lagrange interpolation (sixth degree) on the
/// samples nearest to t; the stencil is shifted inward near the ends.
double resample_at(std::span<const double> trace, double t0, double dt, double t);

}  // namespace elastic2d
