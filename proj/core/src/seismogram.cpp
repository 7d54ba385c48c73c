#include "elastic2d/seismogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "elastic2d/error.hpp"

namespace elastic2d {

void Seismogram::validate() const {
  if (ux.size() != uy.size()) throw InvalidArgument("seismogram '" + label + "': trace lengths differ");
  if (!ux.empty() && !(dt > 0.0)) throw InvalidArgument("seismogram '" + label + "': dt must be positive");
}

std::vector<double> Seismogram::magnitude() const {
  std::vector<double> m(ux.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = std::hypot(ux[k], uy[k]);
  return m;
}

Seismogram to_seismogram(const Receiver& r) {
  Seismogram s;
  s.label = r.label();
  s.position = r.position();
  s.ux = r.ux();
  s.uy = r.uy();
  if (!r.times().empty()) s.t0 = r.times().front();
  if (r.size() >= 2) s.dt = r.times()[1] - r.times()[0];
  return s;
}

void write_seismogram(const Seismogram& s, const std::string& path) {
  s.validate();
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error("cannot open '" + path + "' for writing");
  std::fprintf(f, "# label=%s position=%.17g,%.17g dt=%.17g\n", s.label.c_str(), s.position.x, s.position.y, s.dt);
  std::fprintf(f, "t,ux,uy\n");
  for (std::size_t k = 0; k < s.size(); ++k) std::fprintf(f, "%.17g,%.17g,%.17g\n", s.time(k), s.ux[k], s.uy[k]);
  const bool ok = std::fclose(f) == 0;
  if (!ok) throw Error("error writing '" + path + "'");
}

Seismogram read_seismogram(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open seismogram '" + path + "'");
  Seismogram s;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw ConfigError(path + ": missing header");
  std::istringstream hs(line.substr(2));
  std::string item;
  bool have_label = false, have_dt = false;
  while (hs >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    const auto key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "label") {
      s.label = val;
      have_label = true;
    } else if (key == "position") {
      if (std::sscanf(val.c_str(), "%lf,%lf", &s.position.x, &s.position.y) != 2)
        throw ConfigError(path + ": malformed position");
    } else if (key == "dt") {
      s.dt = std::stod(val);
      have_dt = true;
    }
  }
  if (!have_label || !have_dt) throw ConfigError(path + ": header needs label and dt");
  if (!std::getline(is, line) || line != "t,ux,uy") throw ConfigError(path + ": missing column line");
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double t, a, b;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &a, &b) != 3) throw ConfigError(path + ": malformed row");
    if (first) s.t0 = t;
    first = false;
    s.ux.push_back(a);
    s.uy.push_back(b);
  }
  s.validate();
  return s;
}

double first_arrival(std::span<const double> trace, double t0, double dt, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("first_arrival: threshold must lie in (0, 1)");
  double peak = 0.0;
  for (double v : trace) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw InvalidArgument("first_arrival: trace is identically zero");
  const double level = threshold * peak;
  for (std::size_t k = 0; k < trace.size(); ++k)
    if (std::abs(trace[k]) > level) return t0 + static_cast<double>(k) * dt;
  return t0;  // unreachable: the peak itself exceeds the level
}

double first_arrival(const Seismogram& s, double threshold) {
  const auto m = s.magnitude();
  return first_arrival(m, s.t0, s.dt, threshold);
}

double window_energy(std::span<const double> trace, double t0, double dt, double a, double b) {
  double e = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    if (t >= a - 1e-9 * dt && t <= b + 1e-9 * dt) e += trace[k] * trace[k] * dt;
  }
  return e;
}

double resample_at(std::span<const double> trace, double t0, double dt, double t) {
  constexpr int kPoints = 7;
  const int n = static_cast<int>(trace.size());
  if (n == 0) throw InvalidArgument("resample_at: empty trace");
  if (n < kPoints) throw InvalidArgument("resample_at: trace shorter than the interpolation stencil");
  const double s = (t - t0) / dt;
  if (s < -1e-9 || s > (n - 1) + 1e-9) throw InvalidArgument("resample_at: time outside the trace");
  int first = static_cast<int>(std::lround(s)) - kPoints / 2;
  first = std::clamp(first, 0, n - kPoints);
  double value = 0.0;
  for (int a = 0; a < kPoints; ++a) {
    double w = 1.0;
    for (int b = 0; b < kPoints; ++b)
      if (b != a) w *= (s - (first + b)) / static_cast<double>(a - b);
    value += w * trace[static_cast<std::size_t>(first + a)];
  }
  return value;
}

}  // namespace elastic2d
