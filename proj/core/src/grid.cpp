#include "elastic2d/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elastic2d/error.hpp"

namespace elastic2d {

void Array2D::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double Array2D::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

void CartesianGrid::validate() const {
  if (nx < 2 || ny < 2) throw InvalidArgument("Cartesian grid needs at least 2x2 nodes");
  if (!(hx > 0.0) || !(hy > 0.0)) throw InvalidArgument("grid spacings must be positive");
}

TimeAxis TimeAxis::fit(double t_begin, double t_end, double dt_max, double sample_interval) {
  if (!(t_end > t_begin)) throw InvalidArgument("time axis needs t_end > t_begin");
  if (!(dt_max > 0.0)) throw InvalidArgument("time step must be positive");
  if (!(sample_interval > 0.0)) throw InvalidArgument("sample interval must be positive");
  const double samples = (t_end - t_begin) / sample_interval;
  const long n_samples = std::lround(samples);
  if (n_samples < 1 || std::abs(samples - static_cast<double>(n_samples)) > 1e-9 * std::max(1.0, samples)) {
    throw InvalidArgument("time interval is not a whole number of sample intervals");
  }
  const long per_sample = std::max(1L, static_cast<long>(std::ceil(sample_interval / dt_max - 1e-12)));
  TimeAxis axis;
  axis.t_begin = t_begin;
  axis.t_end = t_end;
  axis.dt = sample_interval / static_cast<double>(per_sample);
  axis.n_steps = n_samples * per_sample;
  axis.steps_per_sample = per_sample;
  axis.validate();
  return axis;
}

void TimeAxis::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const double span = t_end - t_begin;
  const double covered = static_cast<double>(n_steps) * dt;
  if (std::abs(covered - span) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_end)) * static_cast<double>(std::max(1L, n_steps))) {
    throw InvalidArgument("n_steps * dt does not cover the time interval");
  }
}

void Receiver::append(double t, double ux, double uy) {
  if (times_.size() >= 2) {
    const double interval = times_[1] - times_[0];
    const double expected = times_.back() + interval;
    if (std::abs(t - expected) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw InvalidArgument("receiver samples must be uniformly spaced in time");
    }
  } else if (!times_.empty() && !(t > times_.back())) {
    throw InvalidArgument("receiver sample times must increase");
  }
  times_.push_back(t);
  ux_.push_back(ux);
  uy_.push_back(uy);
}

}  // namespace elastic2d
