#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "elastic2d/compare.hpp"
#include "elastic2d/curve.hpp"
#include "elastic2d/error.hpp"
#include "elastic2d/seismogram.hpp"
#include "elastic2d/snapshot.hpp"

using namespace elastic2d;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("elastic2d_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Ricker-like pulse arriving at t_a.
Seismogram pulse(const std::string& label, double t_a, double amp, double dt = 0.01, int n = 600) {
  Seismogram s;
  s.label = label;
  s.position = {0.5, -1.0};
  s.dt = dt;
  for (int k = 0; k < n; ++k) {
    const double t = k * dt;
    const double v = t > t_a && t < t_a + 0.5 ? std::sin(2 * std::numbers::pi * (t - t_a) / 0.5) : 0.0;
    s.ux.push_back(amp * v);
    s.uy.push_back(-0.5 * amp * v);
  }
  return s;
}

Snapshot square_snapshot(double value) {
  SnapshotPatch p;
  p.nx = 21;
  p.ny = 21;
  for (int j = 0; j < 21; ++j)
    for (int i = 0; i < 21; ++i) {
      p.x.push_back(-1.0 + 0.1 * i);
      p.y.push_back(-1.0 + 0.1 * j);
      p.solid.push_back(1);
      p.ux.push_back(value);
      p.uy.push_back(0.0);
    }
  Snapshot s;
  s.time = 2.8;
  s.patches.push_back(p);
  return s;
}

}  // namespace

TEST_SUITE("outputs") {

TEST_CASE("seismogram csv round trip is exact") {
  auto s = pulse("N", 1.0, 1e-3);
  s.ux[7] = 1.0 / 3.0;
  const auto dir = scratch("seis");
  write_seismogram(s, (dir / "N.csv").string());
  const auto r = read_seismogram((dir / "N.csv").string());
  CHECK(r.label == "N");
  CHECK(r.position.x == s.position.x);
  CHECK(r.dt == s.dt);
  CHECK(r.ux == s.ux);
  CHECK(r.uy == s.uy);
  CHECK_THROWS_AS(read_seismogram((dir / "missing.csv").string()), Error);
}

TEST_CASE("first arrival uses a fraction of the peak") {
  const auto s = pulse("E", 1.234, 2.0, 0.001, 3000);
  const double t = first_arrival(s);
  CHECK(t >= 1.234);
  CHECK(t < 1.234 + 0.01);
  // invariant under scaling
  const auto s2 = pulse("E", 1.234, 7e-5, 0.001, 3000);
  CHECK(first_arrival(s2) == doctest::Approx(t));
  const std::vector<double> zero(10, 0.0);
  CHECK_THROWS_AS(first_arrival(zero, 0.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(first_arrival(s.ux, 0.0, 0.001, 1.5), InvalidArgument);
}

TEST_CASE("window energy of a sine") {
  std::vector<double> u;
  const double dt = 1e-3;
  for (int k = 0; k <= 4000; ++k) u.push_back(std::sin(2 * std::numbers::pi * k * dt));
  // integral of sin^2 over whole periods is half the length
  CHECK(window_energy(u, 0.0, dt, 1.0, 3.0) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(window_energy(u, 0.0, dt, 5.0, 6.0) == 0.0);
}

TEST_CASE("resampling is exact for low degree polynomials") {
  std::vector<double> u;
  for (int k = 0; k < 50; ++k) {
    const double t = 0.5 + 0.1 * k;
    u.push_back(1 - t + 0.3 * t * t * t - 0.01 * std::pow(t, 6));
  }
  for (double t : {0.5, 0.53, 2.71, 5.37}) {
    const double exact = 1 - t + 0.3 * t * t * t - 0.01 * std::pow(t, 6);
    CHECK(resample_at(u, 0.5, 0.1, t) == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("comparing a run with itself") {
  const std::vector<Seismogram> a{pulse("N", 1.0, 1.0), pulse("S", 1.5, 2.0)};
  const auto rep = compare_runs(a, a, TimeWindow{2.0, 4.0});
  REQUIRE(rep.receivers.size() == 2);
  for (const auto& r : rep.receivers) {
    CHECK(r.arrival_relative_delta == 0.0);
    CHECK(r.max_difference == 0.0);
    CHECK(r.best_fit_scale == doctest::Approx(1.0));
    CHECK_FALSE(r.energy_only_in_a);
    CHECK_FALSE(r.energy_only_in_b);
  }
  CHECK(rep.to_json().find("\"N\"") != std::string::npos);
  CHECK(rep.to_text().find("S") != std::string::npos);
}

TEST_CASE("comparison reports arrival shifts and energy differences") {
  const std::vector<Seismogram> a{pulse("E", 1.0, 1.0)};
  const std::vector<Seismogram> b{pulse("E", 1.1, 3.0, 0.005, 1200)};
  const auto rep = compare_runs(a, b, TimeWindow{0.0, 6.0});
  const auto& e = rep.at("E");
  CHECK(e.arrival_relative_delta == doctest::Approx(0.1).epsilon(0.05));
  CHECK(e.energy_b_ux / e.energy_a_ux == doctest::Approx(9.0).epsilon(0.05));
  CHECK(e.energy_only_in_b);
  CHECK_THROWS_AS(rep.at("W"), InvalidArgument);
  const std::vector<Seismogram> c{pulse("Q", 1.0, 1.0)};
  CHECK_THROWS_AS(compare_runs(a, c), InvalidArgument);
}

TEST_CASE("snapshot round trip") {
  auto s = square_snapshot(0.5);
  s.patches[0].solid[3] = 0;
  s.patches[0].uy[10] = -1.25;
  const auto dir = scratch("snap");
  write_snapshot(s, dir.string(), "t0002.8000");
  for (const auto* name : {"t0002.8000.txt", "t0002.8000.bin"}) {
    const auto r = read_snapshot((dir / name).string());
    CHECK(r.time == s.time);
    REQUIRE(r.patches.size() == 1);
    CHECK(r.patches[0].x == s.patches[0].x);
    CHECK(r.patches[0].solid == s.patches[0].solid);
    CHECK(r.patches[0].uy == s.patches[0].uy);
  }
  CHECK(s.max_abs("uy") == 1.25);
  CHECK_THROWS_AS(s.max_abs("pressure"), InvalidArgument);
}

TEST_CASE("rayleigh band energy is quadratic and local") {
  const auto curve = BoundaryCurve::arc({0.0, 0.0}, 0.5, 0.0, 2 * std::numbers::pi);
  const double e1 = rayleigh_energy(square_snapshot(1.0), curve, 0.2);
  const double e2 = rayleigh_energy(square_snapshot(2.0), curve, 0.2);
  CHECK(e1 > 0.0);
  CHECK(e2 == doctest::Approx(4.0 * e1));
  // band area: annulus 0.3 < r < 0.7
  CHECK(e1 == doctest::Approx(std::numbers::pi * (0.49 - 0.09)).epsilon(0.15));
  CHECK(rayleigh_energy(square_snapshot(0.0), curve, 0.2) == 0.0);
  const auto big = BoundaryCurve::arc({0.0, 0.0}, 0.95, 0.0, 2 * std::numbers::pi);
  CHECK_THROWS_AS(rayleigh_energy(square_snapshot(1.0), big, 0.2), InvalidArgument);
}

TEST_CASE("render writes a binary ppm") {
  auto s = square_snapshot(0.0);
  for (std::size_t k = 0; k < s.patches[0].ux.size(); ++k) s.patches[0].ux[k] = s.patches[0].x[k];
  const auto dir = scratch("render");
  const auto path = (dir / "u.ppm").string();
  render_ppm(s, "ux", path, 100);
  std::ifstream is(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, mx = 0;
  is >> magic >> w >> h >> mx;
  CHECK(magic == "P6");
  CHECK(w == 100);
  CHECK(h == 100);
  CHECK(mx == 255);
  is.get();
  std::vector<unsigned char> px(static_cast<std::size_t>(3 * w * h));
  is.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  CHECK(is.good());
  // left edge dark, right edge bright
  const int row = h / 2;
  CHECK(px[static_cast<std::size_t>(3 * (row * w + 1))] < 20);
  CHECK(px[static_cast<std::size_t>(3 * (row * w + w - 2))] > 235);
  CHECK_THROWS_AS(render_ppm(s, "bogus", path), InvalidArgument);
}

}
