#include <cmath>
#include <random>

#include "doctest.h"
#include "elastic2d/error.hpp"
#include "elastic2d/sbp_operators.hpp"

using namespace elastic2d;

namespace {

double sbp_identity_defect(const SbpOperators& ops) {
  const int n = ops.size();
  const auto D = ops.d1_matrix();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double q = ops.norm(i) * D[static_cast<std::size_t>(i) * n + j] + ops.norm(j) * D[static_cast<std::size_t>(j) * n + i];
      const double b = (i == j && i == 0) ? -1.0 : (i == j && i == n - 1) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(q - b));
    }
  return worst;
}

}  // namespace

TEST_SUITE("sbp_operators") {

TEST_CASE("unsupported orders and short grids are rejected") {
  CHECK_THROWS_AS(SbpOperators::build(5, 40), InvalidArgument);
  CHECK_THROWS_AS(SbpOperators::build(2, 40), InvalidArgument);
  for (int o : {4, 6, 8}) {
    CHECK_THROWS_AS(SbpOperators::build(o, SbpOperators::min_size(o) - 1), InvalidArgument);
    CHECK_NOTHROW(SbpOperators::build(o, SbpOperators::min_size(o)));
  }
}

TEST_CASE("summation by parts identity holds to rounding") {
  for (int o : {4, 6, 8})
    for (int n : {SbpOperators::min_size(o), 37, 64}) {
      auto ops = SbpOperators::build(o, n);
      CHECK(sbp_identity_defect(*ops) < 1e-12);
    }
}

TEST_CASE("norm is positive and integrates low degree polynomials") {
  for (int o : {4, 6, 8}) {
    const int n = 41;
    auto ops = SbpOperators::build(o, n);
    for (int i = 0; i < n; ++i) CHECK(ops->norm(i) > 0.0);
    for (int q = 0; q < o; ++q) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += ops->norm(i) * std::pow(static_cast<double>(i) / (n - 1), q);
      CHECK(s / (n - 1) == doctest::Approx(1.0 / (q + 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("first derivative is exact for polynomials") {
  for (int o : {4, 6, 8}) {
    const int n = 40;
    auto ops = SbpOperators::build(o, n);
    const int r = ops->closure_rows();
    for (int q = 0; q <= o; ++q) {
      std::vector<double> x(n), d(n);
      for (int i = 0; i < n; ++i) x[i] = std::pow((i - 20.0) / 20.0, q);
      ops->apply_d1(x.data(), 1, d.data(), 1);
      for (int i = 0; i < n; ++i) {
        const bool boundary = i < r || i >= n - r;
        if (boundary && q > o / 2) continue;
        const double exact = q == 0 ? 0.0 : q * std::pow((i - 20.0) / 20.0, q - 1) / 20.0;
        CHECK(std::abs(d[i] - exact) < 1e-12);
      }
    }
  }
}

TEST_CASE("transpose application matches the dense matrix") {
  for (int o : {4, 6, 8}) {
    const int n = 33;
    auto ops = SbpOperators::build(o, n);
    const auto D = ops->d1_matrix();
    std::vector<double> y(n), out(n);
    for (int i = 0; i < n; ++i) y[i] = std::sin(0.7 * i + 0.3);
    ops->apply_d1_transpose(y.data(), 1, out.data(), 1);
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += D[static_cast<std::size_t>(i) * n + j] * y[i];
      CHECK(out[j] == doctest::Approx(s).epsilon(1e-12));
    }
    // strided access agrees with contiguous
    std::vector<double> ys(2 * n), outs(3 * n, 0.0);
    for (int i = 0; i < n; ++i) ys[2 * i] = y[i];
    ops->apply_d1(ys.data(), 2, outs.data(), 3);
    std::vector<double> ref(n);
    ops->apply_d1(y.data(), 1, ref.data(), 1);
    for (int i = 0; i < n; ++i) CHECK(outs[3 * i] == doctest::Approx(ref[i]));
  }
}

TEST_CASE("second derivative is exact for polynomials up to the boundary order") {
  for (int o : {4, 6, 8}) {
    const int n = 40;
    auto ops = SbpOperators::build(o, n);
    std::vector<double> b(n, 1.0);
    for (int q = 0; q <= o / 2; ++q) {
      std::vector<double> x(n), d(n);
      for (int i = 0; i < n; ++i) x[i] = std::pow((i - 15.0) / 20.0, q);
      ops->apply_d2(b.data(), x.data(), d.data());
      for (int i = 0; i < n; ++i) {
        const double exact = q < 2 ? 0.0 : q * (q - 1) * std::pow((i - 15.0) / 20.0, q - 2) / 400.0;
        CHECK(std::abs(d[i] - exact) < 1e-11);
      }
    }
  }
}

TEST_CASE("energy matrix is symmetric, semidefinite and kills constants") {
  for (int o : {4, 6, 8}) {
    const int n = 30;
    auto ops = SbpOperators::build(o, n);
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) b[i] = 1.0 + 0.5 * std::sin(0.3 * i);
    const auto M = ops->energy_matrix(b);
    double asym = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) asym = std::max(asym, std::abs(M[i * n + j] - M[j * n + i]));
    CHECK(asym < 1e-13);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += M[i * n + j];
      CHECK(std::abs(s) < 1e-12);
    }
    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(n);
      for (auto& x : v) x = g(rng);
      double q = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q += v[i] * M[i * n + j] * v[j];
      CHECK(q >= -1e-12);
    }
  }
}

TEST_CASE("energy form reproduces apply_d2") {
  // -H D2 u = M u - B b S u with S the boundary rows of D1.
  const int n = 30;
  auto ops = SbpOperators::build(8, n);
  std::vector<double> b(n), u(n), d2(n);
  for (int i = 0; i < n; ++i) {
    b[i] = 1.0 + 0.2 * std::cos(0.4 * i);
    u[i] = std::sin(0.35 * i) + 0.01 * i * i;
  }
  ops->apply_d2(b.data(), u.data(), d2.data());
  const auto M = ops->energy_matrix(b);
  std::vector<double> du(n);
  ops->apply_d1(u.data(), 1, du.data(), 1);
  for (int i = 0; i < n; ++i) {
    double mu = 0.0;
    for (int j = 0; j < n; ++j) mu += M[i * n + j] * u[j];
    double bs = 0.0;
    if (i == 0) bs = -b[0] * du[0];
    if (i == n - 1) bs = b[n - 1] * du[n - 1];
    CHECK(-ops->norm(i) * d2[i] == doctest::Approx(mu - bs).epsilon(1e-10));
  }
}

TEST_CASE("spectral radius is bounded below by the interior symbol") {
  for (int o : {4, 6, 8}) {
    auto ops = SbpOperators::build(o, 80);
    double symbol = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double th = 3.14159265358979 * k / 1000.0;
      double s = 0.0;
      for (std::size_t m = 0; m < ops->interior().size(); ++m) s += 2.0 * ops->interior()[m] * std::sin((m + 1.0) * th);
      symbol = std::max(symbol, s * s);
    }
    const double rho = sbp_spectral_radius(*ops);
    CHECK(std::isfinite(rho));
    CHECK(rho > 0.95 * symbol);
    CHECK(rho < 10.0 * symbol);
  }
}

}
