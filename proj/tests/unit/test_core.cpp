#include <cmath>

#include "doctest.h"
#include "elastic2d/error.hpp"
#include "elastic2d/grid.hpp"
#include "elastic2d/material.hpp"
#include "elastic2d/norms.hpp"

using namespace elastic2d;

TEST_SUITE("core") {

TEST_CASE("material speeds round trip through the Lame parameters") {
  const auto m = material_from_speeds(1.0, 0.5, 1.0);
  CHECK(m.mu() == doctest::Approx(0.25));
  CHECK(m.lambda() == doctest::Approx(0.5));
  CHECK(m.cp() == doctest::Approx(1.0));
  CHECK(m.cs() == doctest::Approx(0.5));
  CHECK(m.p_modulus() == doctest::Approx(1.0));
}

TEST_CASE("poisson ratios of the reference materials") {
  // cp = 2 cs gives one third; the two crustal rocks are quoted to 4 digits.
  CHECK(material_from_speeds(1.0, 0.5, 1.0).poisson_ratio() == doctest::Approx(1.0 / 3.0));
  CHECK(material_from_speeds(1.765, 1.0, 1.0).poisson_ratio() == doctest::Approx(0.2636).epsilon(2e-4));
  CHECK(material_from_speeds(1.892, 1.088, 1.0).poisson_ratio() == doctest::Approx(0.2530).epsilon(2e-4));
}

TEST_CASE("invalid materials are rejected") {
  CHECK_THROWS_AS(Material(0.0, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Material(1.0, 1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(material_from_speeds(1.0, 1.0, 1.0), InvalidArgument);
  // cp / cs below sqrt(4/3) puts nu under -1
  CHECK_THROWS_AS(material_from_speeds(1.0, 0.9, 1.0), InvalidArgument);
}

TEST_CASE("shortest wavelength and grid spacing") {
  const auto m = material_from_speeds(1.0, 0.5, 1.0);
  // S wave at f_max = 4: 0.5 / 4
  CHECK(shortest_wavelength(m, 4.0) == doctest::Approx(0.125));
  CHECK(spacing_for_ppw(0.125, 12.0) == doctest::Approx(1.0 / 96.0));
  CHECK_THROWS_AS(spacing_for_ppw(0.125, 0.0), InvalidArgument);
}

TEST_CASE("array2d is x fastest") {
  Array2D a(3, 2);
  a(2, 1) = 5.0;
  CHECK(a.values()[5] == 5.0);
  CHECK(a.index(1, 1) == 4);
  a(0, 0) = -7.0;
  CHECK(a.max_abs() == 7.0);
}

TEST_CASE("cartesian grid validation") {
  CartesianGrid g{{0.0, 0.0}, 11, 5, 0.1, 0.25};
  CHECK_NOTHROW(g.validate());
  CHECK(g.x_max() == doctest::Approx(1.0));
  CHECK(g.y_max() == doctest::Approx(1.0));
  g.nx = 1;
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
}

TEST_CASE("time axis lands on sample times") {
  const auto ax = TimeAxis::fit(0.0, 2.5, 0.0037, 0.01);
  CHECK(ax.dt <= 0.0037);
  CHECK(ax.steps_per_sample * ax.dt == doctest::Approx(0.01));
  CHECK(ax.time(ax.n_steps) == doctest::Approx(2.5));
  CHECK(ax.n_steps % ax.steps_per_sample == 0);
  CHECK_THROWS_AS(TimeAxis::fit(0.0, 2.505, 0.0037, 0.01), InvalidArgument);
}

TEST_CASE("receiver samples must be evenly spaced") {
  Receiver r("N", {0.0, 1.0});
  r.append(0.0, 1.0, 2.0);
  r.append(0.1, 1.0, 2.0);
  CHECK_THROWS_AS(r.append(0.3, 0.0, 0.0), InvalidArgument);
  CHECK(r.size() == 2);
}

TEST_CASE("relative max error") {
  const std::vector<double> num{1.0, 2.0, 3.0}, ref{1.0, 2.5, 4.0};
  CHECK(relative_max_error(num, ref) == doctest::Approx(0.25));
  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(relative_max_error(num, zero), InvalidArgument);
  const std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(relative_max_error(num, shorter), InvalidArgument);
  // shared normalisation across components
  const std::vector<double> nu{0.0}, nv{1.0}, ru{2.0}, rv{1.0};
  CHECK(relative_max_error(nu, nv, ru, rv) == doctest::Approx(1.0));
}

TEST_CASE("convergence orders") {
  auto o = convergence_order(16.0, 4.0, 1.0);
  CHECK(o.coarse == doctest::Approx(2.0));
  CHECK(o.fine == doctest::Approx(2.0));
  CHECK(o.monotone);
  o = convergence_order(1.0, 1.0 / 32.0, 1.0 / 1024.0);
  CHECK(o.fine == doctest::Approx(5.0));
  o = convergence_order(1.0, 2.0, 0.5);
  CHECK_FALSE(o.monotone);
  CHECK_THROWS_AS(convergence_order(1.0, 0.0, 0.0), InvalidArgument);
}

}
