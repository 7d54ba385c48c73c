#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "elastic2d/bessel.hpp"
#include "elastic2d/cavity_scatter.hpp"
#include "elastic2d/error.hpp"
#include "elastic2d/manufactured.hpp"
#include "fd_oracle.hpp"

using namespace elastic2d;

TEST_SUITE("analytic") {

TEST_CASE("bessel sequences agree with the standard library") {
  for (double x : {0.05, 0.9, 3.7, 25.0, 50.0, 120.0}) {
    const int n = 60;
    const auto J = bessel_j_sequence(n, x);
    const auto Y = bessel_y_sequence(n, x);
    for (int k = 0; k <= n; ++k) {
      const double j = std::cyl_bessel_j(static_cast<double>(k), x);
      CHECK(std::abs(J[k] - j) <= 1e-12 * std::max(1.0, std::abs(j)) + 1e-300);
      const double y = std::cyl_neumann(static_cast<double>(k), x);
      if (std::abs(y) < 1e250) CHECK(std::abs(Y[k] - y) <= 1e-10 * std::max(1.0, std::abs(y)));
    }
  }
}

TEST_CASE("cavity parameters follow from the wavelengths") {
  CavityScatterParams p;
  CavityScatter cs(p);
  CHECK(cs.omega() == doctest::Approx(8 * std::numbers::pi));
  CHECK(cs.kp() == doctest::Approx(8 * std::numbers::pi));
  CHECK(cs.ks() == doctest::Approx(16 * std::numbers::pi));
  const auto m = p.material();
  CHECK(m.cp() == doctest::Approx(1.0));
  CHECK(m.cs() == doctest::Approx(0.5));
  CHECK(cs.modes() > 20);
  CHECK(cs.modes() < 200);
  // trailing coefficients have decayed
  const auto& a = cs.p_coefficients();
  CHECK(std::abs(a.back()) < 1e-10 * std::abs(a.front()) + 1e-10);
}

TEST_CASE("cavity field satisfies the time harmonic Navier equation") {
  CavityScatter cs(CavityScatterParams{});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ur(1.05, 3.0), ut(0.0, 2 * std::numbers::pi);
  for (int k = 0; k < 40; ++k) {
    const double r = ur(rng), t = ut(rng);
    CHECK(fd::cavity_pde_residual(cs, r * std::cos(t), r * std::sin(t), 1e-3) < 1e-8);
  }
}

TEST_CASE("cavity rim is traction free") {
  CavityScatter cs(CavityScatterParams{});
  for (int k = 0; k < 24; ++k) CHECK(fd::cavity_rim_traction(cs, 2 * std::numbers::pi * k / 24.0 + 0.1, 2e-4) < 1e-8);
}

TEST_CASE("the field moves with the cavity") {
  // incident phase is measured from the cavity centre
  CavityScatterParams p;
  CavityScatter c0(p);
  p.centre = {0.7, -0.4};
  CavityScatter c1(p);
  const auto a = c0.amplitude(1.5, 0.3);
  const auto b = c1.amplitude(2.2, -0.1);
  CHECK(std::abs(b[0] - a[0]) < 1e-12);
  CHECK(std::abs(b[1] - a[1]) < 1e-12);
}

TEST_CASE("small cavity scatters almost nothing") {
  CavityScatterParams p;
  p.radius = 1e-3;
  CavityScatter cs(p);
  const auto u = cs.amplitude(0.4, 0.3);
  const auto inc = std::exp(std::complex<double>(0.0, cs.kp() * 0.4));
  CHECK(std::abs(u[0] - inc) < 1e-3);
  CHECK(std::abs(u[1]) < 1e-3);
}

TEST_CASE("time evaluation is the real part of a harmonic") {
  CavityScatter cs(CavityScatterParams{});
  const auto amp = cs.amplitude(1.3, 0.9);
  const double w = cs.omega(), t = 0.137;
  const auto u = CavityScatter::evaluate(amp, w, t);
  const auto e = std::exp(std::complex<double>(0.0, -w * t));
  CHECK(u.x == doctest::Approx((amp[0] * e).real()));
  CHECK(u.y == doctest::Approx((amp[1] * e).real()));
  const double dt = 1e-5;
  const auto up = CavityScatter::evaluate(amp, w, t + dt), um = CavityScatter::evaluate(amp, w, t - dt);
  const auto v = CavityScatter::evaluate(amp, w, t, 1);
  CHECK(v.x == doctest::Approx((up.x - um.x) / (2 * dt)).epsilon(1e-6));
  const auto acc = CavityScatter::evaluate(amp, w, t, 2);
  CHECK(acc.y == doctest::Approx(-w * w * u.y));
  CHECK_THROWS_AS(cs.amplitude(0.2, 0.1), InvalidArgument);
}

TEST_CASE("manufactured forcing balances the equation") {
  const auto m = material_from_speeds(std::sqrt(3.0), 1.0, 1.3);
  const auto ms = mms_pair(m);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0), ut(0.0, 2.0);
  for (int k = 0; k < 50; ++k) CHECK(fd::mms_residual(ms, u(rng), u(rng), ut(rng), 1e-2) < 1e-10);
}

TEST_CASE("manufactured stress and traction are consistent") {
  const auto m = material_from_speeds(2.0, 1.0, 1.0);
  const auto ms = mms_pair(m);
  const double x = 0.3, y = -0.8, t = 0.4;
  const auto s = ms.stress(x, y, t);
  const Point n{0.6, 0.8};
  const auto tr = ms.traction(x, y, t, n);
  CHECK(tr.x == doctest::Approx(s.xx * n.x + s.xy * n.y));
  CHECK(tr.y == doctest::Approx(s.xy * n.x + s.yy * n.y));
  // sigma_xx from finite differences of the displacement
  const double e = 1e-5;
  const double ux = (ms.displacement(x + e, y, t).x - ms.displacement(x - e, y, t).x) / (2 * e);
  const double vy = (ms.displacement(x, y + e, t).y - ms.displacement(x, y - e, t).y) / (2 * e);
  CHECK(s.xx == doctest::Approx(m.p_modulus() * ux + m.lambda() * vy).epsilon(1e-8));
}

}
