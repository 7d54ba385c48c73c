#include "elastic2d/compare.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "elastic2d/error.hpp"
#include "json.hpp"

namespace elastic2d {

namespace {

// Samples of b on the time grid of a, restricted to the overlap.
Seismogram resample_like(const Seismogram& b, const Seismogram& a) {
  if (b.dt == a.dt && b.t0 == a.t0) return b;
  Seismogram r;
  r.label = b.label;
  r.position = b.position;
  r.t0 = a.t0;
  r.dt = a.dt;
  const double b_end = b.time(b.size() - 1);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a.time(k);
    if (t < b.t0 - 1e-9 * b.dt || t > b_end + 1e-9 * b.dt) break;
    r.ux.push_back(resample_at(b.ux, b.t0, b.dt, t));
    r.uy.push_back(resample_at(b.uy, b.t0, b.dt, t));
  }
  return r;
}

}  // namespace

const ReceiverComparison& ComparisonReport::at(const std::string& label) const {
  for (const auto& r : receivers)
    if (r.label == label) return r;
  throw InvalidArgument("no receiver '" + label + "' in the comparison");
}

std::string ComparisonReport::to_text() const {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "window [" << window.begin << ", " << window.end << "], arrival threshold " << threshold << "\n";
  os << std::left << std::setw(8) << "label" << std::setw(12) << "arrival_a" << std::setw(12) << "arrival_b"
     << std::setw(12) << "rel_delta" << std::setw(13) << "E_a(ux)" << std::setw(13) << "E_b(ux)" << std::setw(13)
     << "max_diff" << std::setw(13) << "scale" << "flags\n";
  for (const auto& r : receivers) {
    os << std::setw(8) << r.label << std::setw(12) << r.arrival_a << std::setw(12) << r.arrival_b << std::setw(12)
       << r.arrival_relative_delta << std::setw(13) << r.energy_a_ux << std::setw(13) << r.energy_b_ux << std::setw(13)
       << r.max_difference << std::setw(13) << r.best_fit_scale;
    if (r.energy_only_in_a) os << "energy-only-in-A";
    if (r.energy_only_in_b) os << "energy-only-in-B";
    os << "\n";
  }
  return os.str();
}

std::string ComparisonReport::to_json() const {
  nlohmann::json j;
  j["window"] = {window.begin, window.end};
  j["threshold"] = threshold;
  j["receivers"] = nlohmann::json::array();
  for (const auto& r : receivers) {
    j["receivers"].push_back({{"label", r.label},
                              {"arrival_a", r.arrival_a},
                              {"arrival_b", r.arrival_b},
                              {"arrival_relative_delta", r.arrival_relative_delta},
                              {"energy_a_ux", r.energy_a_ux},
                              {"energy_b_ux", r.energy_b_ux},
                              {"energy_a_uy", r.energy_a_uy},
                              {"energy_b_uy", r.energy_b_uy},
                              {"max_difference", r.max_difference},
                              {"best_fit_scale", r.best_fit_scale},
                              {"energy_only_in_a", r.energy_only_in_a},
                              {"energy_only_in_b", r.energy_only_in_b}});
  }
  return j.dump(2);
}

ComparisonReport compare_runs(const std::vector<Seismogram>& a, const std::vector<Seismogram>& b,
                              std::optional<TimeWindow> window, double threshold) {
  ComparisonReport rep;
  rep.threshold = threshold;
  bool window_set = false;
  for (const auto& sa : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const Seismogram& s) { return s.label == sa.label; });
    if (it == b.end()) continue;
    sa.validate();
    it->validate();
    if (sa.size() < 2 || it->size() < 2) throw InvalidArgument("receiver '" + sa.label + "' has too few samples");
    const Seismogram sb = resample_like(*it, sa);
    const std::size_t n = std::min(sa.size(), sb.size());
    if (n < 2) throw InvalidArgument("receiver '" + sa.label + "': runs do not overlap in time");
    if (!window_set) {
      rep.window = window.value_or(TimeWindow{sa.t0, sa.time(n - 1)});
      if (!(rep.window.end > rep.window.begin)) throw InvalidArgument("comparison window is empty");
      window_set = true;
    }
    std::span<const double> ax(sa.ux.data(), n), ay(sa.uy.data(), n), bx(sb.ux.data(), n), by(sb.uy.data(), n);
    ReceiverComparison r;
    r.label = sa.label;
    const auto ma = sa.magnitude(), mb = sb.magnitude();
    r.arrival_a = first_arrival(std::span<const double>(ma.data(), n), sa.t0, sa.dt, threshold);
    r.arrival_b = first_arrival(std::span<const double>(mb.data(), n), sa.t0, sa.dt, threshold);
    r.arrival_relative_delta = r.arrival_a > 0.0 ? std::abs(r.arrival_a - r.arrival_b) / r.arrival_a : 0.0;
    const auto& w = rep.window;
    r.energy_a_ux = window_energy(ax, sa.t0, sa.dt, w.begin, w.end);
    r.energy_b_ux = window_energy(bx, sa.t0, sa.dt, w.begin, w.end);
    r.energy_a_uy = window_energy(ay, sa.t0, sa.dt, w.begin, w.end);
    r.energy_b_uy = window_energy(by, sa.t0, sa.dt, w.begin, w.end);
    double peak = 0.0, diff = 0.0, ab = 0.0, bb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = sa.time(k);
      if (t < w.begin - 1e-9 * sa.dt || t > w.end + 1e-9 * sa.dt) continue;
      peak = std::max({peak, std::abs(ax[k]), std::abs(ay[k])});
      diff = std::max({diff, std::abs(ax[k] - bx[k]), std::abs(ay[k] - by[k])});
      ab += ax[k] * bx[k] + ay[k] * by[k];
      bb += bx[k] * bx[k] + by[k] * by[k];
    }
    r.max_difference = peak > 0.0 ? diff / peak : (diff > 0.0 ? INFINITY : 0.0);
    r.best_fit_scale = bb > 0.0 ? ab / bb : 1.0;
    const double ea = r.energy_a_ux + r.energy_a_uy, eb = r.energy_b_ux + r.energy_b_uy;
    r.energy_only_in_a = ea > 4.0 * eb;
    r.energy_only_in_b = eb > 4.0 * ea;
    rep.receivers.push_back(r);
  }
  if (rep.receivers.empty()) throw InvalidArgument("the runs share no receiver labels");
  return rep;
}

std::vector<Seismogram> load_run_seismograms(const std::string& run_directory) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(run_directory) / "receivers";
  if (!fs::is_directory(dir)) throw ConfigError("'" + run_directory + "' has no receivers/ directory");
  std::vector<Seismogram> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") out.push_back(read_seismogram(e.path().string()));
  std::sort(out.begin(), out.end(), [](const Seismogram& x, const Seismogram& y) { return x.label < y.label; });
  return out;
}

}  // namespace elastic2d
