#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace elastic2d {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Dense 2D array, row-major with i (x / xi) fastest: index = j * nx + i.
class Array2D {
 public:
  Array2D() = default;
  Array2D(int nx, int ny, double value = 0.0)
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, value) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx_ + i;
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  void fill(double v);
  double max_abs() const noexcept;

 private:
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

/// Regularly spaced node lattice: node (i, j) sits at origin + (i hx, j hy).
struct CartesianGrid {
  Point origin;
  int nx = 2;
  int ny = 2;
  double hx = 1.0;
  double hy = 1.0;

  /// Throws InvalidArgument when nx, ny < 2 or spacings are not positive.
  void validate() const;
  double x(double i) const noexcept { return origin.x + i * hx; }
  double y(double j) const noexcept { return origin.y + j * hy; }
  double x_max() const noexcept { return x(nx - 1); }
  double y_max() const noexcept { return y(ny - 1); }
};

/// Uniform time discretization of [t_begin, t_end].
struct TimeAxis {
  double t_begin = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  long n_steps = 0;

  /// Chooses the largest dt <= dt_max that divides `sample_interval`
  /// evenly, so outputs land exactly on time steps. The interval
  /// [t_begin, t_end] must be a whole number of sample intervals.
  static TimeAxis fit(double t_begin, double t_end, double dt_max, double sample_interval);

  void validate() const;
  double time(long step) const noexcept { return t_begin + static_cast<double>(step) * dt; }
  /// Number of time steps per sample interval (set by fit; 1 otherwise).
  long steps_per_sample = 1;
};

/// A point recorder of horizontal and vertical displacement.
class Receiver {
 public:
  Receiver() = default;
  Receiver(std::string label, Point position) : label_(std::move(label)), position_(position) {}

  const std::string& label() const noexcept { return label_; }
  Point position() const noexcept { return position_; }

  /// Appends one sample; times must advance by a constant interval.
  void append(double t, double ux, double uy);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& ux() const noexcept { return ux_; }
  const std::vector<double>& uy() const noexcept { return uy_; }
  std::size_t size() const noexcept { return times_.size(); }

 private:
  std::string label_;
  Point position_;
  std::vector<double> times_;
  std::vector<double> ux_;
  std::vector<double> uy_;
};

}  // namespace elastic2d
