#include <cmath>

#include "doctest.h"
#include "elastic2d/error.hpp"
#include "elastic2d/scene.hpp"
#include "elastic2d/svs_solver.hpp"
#include "svs_checks.hpp"

using namespace elastic2d;

TEST_SUITE("svs_solver") {

TEST_CASE("staggered coefficients are fourth order") {
  // d/dx on offsets 1/2 and 3/2: first moment one, third moment zero
  CHECK(2 * (kSvsC1 * 0.5 + kSvsC2 * 1.5) == doctest::Approx(1.0));
  CHECK(kSvsC1 * 0.125 + kSvsC2 * 3.375 == doctest::Approx(0.0));
  CHECK(svs_stability_constant() == doctest::Approx((9.0 / 8 + 1.0 / 24) * std::sqrt(2.0)));
}

TEST_CASE("uniform raster and time step") {
  const auto m = material_from_speeds(2.0, 1.0, 1.5);
  const CartesianGrid g{{0, 0}, 20, 10, 0.1, 0.1};
  const auto r = uniform_raster(m, g, false);
  CHECK(raster_max_p_speed(r) == doctest::Approx(2.0));
  CHECK(cfl_dt(r, 0.9) == doctest::Approx(0.9 * 0.1 / (2.0 * svs_stability_constant())));
  CHECK(r.rho_x(3, 4) == doctest::Approx(1.5));
  CHECK(r.mu_xy(3, 4) == doctest::Approx(m.mu()));
}

TEST_CASE("rasterized cavity is air and decouples shear") {
  SceneGeometry s;
  s.x_min = -2;
  s.x_max = 2;
  s.y_min = -2;
  s.y_max = 2;
  s.cavities = {{{0, 0}, 1.0}};
  s.materials = {material_from_speeds(1.0, 0.5, 1.0)};
  AirProperties air;
  const CartesianGrid g{{-2, -2}, 41, 41, 0.1, 0.1};
  const auto r = rasterize_scene(s, g, air);
  CHECK(r.is_air(20, 20));
  CHECK_FALSE(r.is_air(0, 0));
  CHECK(r.mu(20, 20) == 0.0);
  CHECK(r.lambda(20, 20) == doctest::Approx(air.cp * air.cp * air.density_ratio));
  // shear points touching an air node get the harmonic mean, which is zero
  CHECK(r.mu_xy(19, 19) == 0.0);
  CHECK(r.mu_xy(0, 0) == doctest::Approx(0.25));
  // density points straddling the rim take the arithmetic mean
  int straddle = 0;
  for (int j = 0; j < 41; ++j)
    for (int i = 0; i + 1 < 41; ++i)
      if (r.is_air(i, j) != r.is_air(i + 1, j)) {
        CHECK(r.rho_x(i, j) == doctest::Approx(0.5 * (1.0 + air.density_ratio)));
        ++straddle;
      }
  CHECK(straddle > 0);
}

TEST_CASE("periodic manufactured solution converges at fourth order") {
  const double e1 = checks::svs_mms_error(16, 0.5, 0.25);
  const double e2 = checks::svs_mms_error(32, 0.5, 0.25);
  CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("energy is conserved on a periodic grid") {
  const auto m = material_from_speeds(1.0, 0.5, 1.0);
  const int N = 48;
  const double h = 1.0 / 16;
  SvsSolver s(uniform_raster(m, CartesianGrid{{0, 0}, N, N, h, h}, true));
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const auto p = s.vx_position(i, j);
      const double x = p.x - 1.5, y = p.y - 1.5;
      s.vx()(i, j) = std::exp(-20 * (x * x + y * y));
    }
  s.start(0.0, cfl_dt(s.raster(), 0.9));
  s.step();
  const double e0 = s.energy();
  for (int k = 0; k < 300; ++k) s.step();
  CHECK(std::abs(s.energy() - e0) / e0 < 1e-12);
}

TEST_CASE("sponge absorbs outgoing waves") {
  const auto m = material_from_speeds(1.0, 0.5, 1.0);
  const int N = 81;
  const double h = 0.05;
  SvsOptions o;
  o.sponge_width = 0.8;
  SvsSolver s(uniform_raster(m, CartesianGrid{{-2, -2}, N, N, h, h}, false), o);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const auto p = s.vx_position(i, j);
      s.vx()(i, j) = std::exp(-30 * (p.x * p.x + p.y * p.y));
    }
  s.start(0.0, cfl_dt(s.raster(), 0.9));
  s.step();
  const double e0 = s.energy();
  double prev = e0;
  while (s.time() < 12.0) {
    s.step();
    const double e = s.energy();
    CHECK(e <= prev * (1 + 1e-12));
    prev = e;
  }
  CHECK(prev < 1e-3 * e0);
}

TEST_CASE("sources radiate and then leave energy constant") {
  const auto m = material_from_speeds(1.0, 0.5, 1.0);
  const int N = 64;
  const double h = 1.0 / 16;
  SvsSolver s(uniform_raster(m, CartesianGrid{{0, 0}, N, N, h, h}, true));
  SourceSpec src;
  src.position = {2.0, 2.0};
  src.omega = 2.0;
  s.add_source(src);
  s.start(0.0, cfl_dt(s.raster(), 0.9));
  while (s.time() < 0.6) s.step();
  const double e1 = s.energy();
  CHECK(e1 > 0.0);
  for (int k = 0; k < 100; ++k) s.step();
  CHECK(std::abs(s.energy() - e1) / e1 < 1e-12);
}

TEST_CASE("probe avoids air and reads displacement") {
  SceneGeometry sc;
  sc.x_min = -2;
  sc.x_max = 2;
  sc.y_min = -2;
  sc.y_max = 2;
  sc.cavities = {{{0, 0}, 1.0}};
  sc.materials = {material_from_speeds(1.0, 0.5, 1.0)};
  const CartesianGrid g{{-2, -2}, 41, 41, 0.1, 0.1};
  SvsSolver s(rasterize_scene(sc, g, AirProperties{}));
  const auto pr = s.probe({1.0, 0.0});
  const auto& r = s.raster();
  CHECK_FALSE(r.is_air(pr.ix, pr.jx));
  CHECK_FALSE(r.is_air(pr.ix + 1, pr.jx));
  s.ux()(pr.ix, pr.jx) = 0.25;
  s.uy()(pr.iy, pr.jy) = -0.5;
  const auto v = s.read(pr);
  CHECK(v.x == 0.25);
  CHECK(v.y == -0.5);
}

TEST_CASE("instability is detected") {
  const auto m = material_from_speeds(1.0, 0.5, 1.0);
  SvsSolver s(uniform_raster(m, CartesianGrid{{0, 0}, 32, 32, 0.1, 0.1}, true));
  s.vx()(5, 5) = 1.0;
  s.start(0.0, 3.0 * cfl_dt(s.raster(), 1.0));
  CHECK_THROWS_AS(
      [&] {
        for (int k = 0; k < 500; ++k) {
          s.step();
          s.check_finite(1e6);
        }
      }(),
      InstabilityError);
}

}
