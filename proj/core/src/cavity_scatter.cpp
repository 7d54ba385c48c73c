#include "elastic2d/cavity_scatter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "elastic2d/bessel.hpp"
#include "elastic2d/error.hpp"

namespace elastic2d {

namespace {

using Complex = std::complex<double>;
constexpr Complex I{0.0, 1.0};

Complex ipow(int n) {
  switch (n % 4) {
    case 0: return 1.0;
    case 1: return I;
    case 2: return -1.0;
    default: return -I;
  }
}

// Radial factor f(r) = Z_n(k r) with its first two r-derivatives.
struct Radial {
  Complex f, df, ddf;
};

Radial radial(Complex zn, Complex znm1, int n, double k, double r) {
  const double x = k * r;
  const Complex dz = n == 0 ? -znm1 : znm1 - static_cast<double>(n) / x * zn;  // znm1 holds Z_1 when n = 0
  const Complex ddz = -dz / x - (1.0 - static_cast<double>(n * n) / (x * x)) * zn;
  return {zn, k * dz, k * k * ddz};
}

// Traction (sigma_rr, sigma_rtheta) factors of phi = f cos, psi = g sin.
std::array<Complex, 2> traction(const Radial& f, const Radial& g, int n, double r, double lambda, double mu, double kp) {
  const double nn = n;
  const Complex srr = -lambda * kp * kp * f.f + 2.0 * mu * (f.ddf + nn * (g.df / r - g.f / (r * r)));
  const Complex srt = mu * (-2.0 * nn * f.df / r + 2.0 * nn * f.f / (r * r) - nn * nn * g.f / (r * r) - g.ddf + g.df / r);
  return {srr, srt};
}

std::vector<Complex> hankel_sequence(int n_max, double x) {
  const auto j = bessel_j_sequence(n_max + 1, x);
  const auto y = bessel_y_sequence(n_max + 1, x);
  std::vector<Complex> h(static_cast<std::size_t>(n_max) + 2);
  for (std::size_t n = 0; n < h.size(); ++n) h[n] = {j[n], y[n]};
  return h;
}

}  // namespace

Material CavityScatterParams::material() const {
  return material_from_speeds(p_wavelength / period, s_wavelength / period, rho);
}

void CavityScatterParams::validate() const {
  if (!(radius > 0.0) || !(p_wavelength > 0.0) || !(s_wavelength > 0.0) || !(period > 0.0) || !(rho > 0.0))
    throw InvalidArgument("cavity scattering parameters must be positive");
  if (!(s_wavelength < p_wavelength)) throw InvalidArgument("S wavelength must be shorter than the P wavelength");
  if (n_modes < 0 || n_modes > 200) throw InvalidArgument("mode count must lie in [0, 200]");
  (void)material();
}

CavityScatter::CavityScatter(const CavityScatterParams& params) : params_(params) {
  params_.validate();
  const Material m = params_.material();
  lambda_ = m.lambda();
  mu_ = m.mu();
  omega_ = 2.0 * std::numbers::pi / params_.period;
  kp_ = 2.0 * std::numbers::pi / params_.p_wavelength;
  ks_ = 2.0 * std::numbers::pi / params_.s_wavelength;
  const double a = params_.radius;
  const int cap = 200;
  const auto jp = bessel_j_sequence(cap + 1, kp_ * a);
  const auto hp = hankel_sequence(cap, kp_ * a);
  const auto hs = hankel_sequence(cap, ks_ * a);
  // Incident potential with unit displacement: phi = -i/k_p exp(i k_p x).
  const Complex amp = -I / kp_;
  std::vector<Complex> A, B;
  double largest = 0.0;
  int used = cap + 1;
  for (int n = 0; n <= cap; ++n) {
    const double eps = n == 0 ? 1.0 : 2.0;
    auto lower = [&](const auto& seq) { return n == 0 ? Complex(seq[1]) : Complex(seq[static_cast<std::size_t>(n) - 1]); };
    const Radial fi = radial(amp * ipow(n) * eps * jp[static_cast<std::size_t>(n)],
                             amp * ipow(n) * eps * lower(jp), n, kp_, a);
    const Radial zero{0.0, 0.0, 0.0};
    const Radial fp = radial(hp[static_cast<std::size_t>(n)], lower(hp), n, kp_, a);
    const Radial gs = radial(hs[static_cast<std::size_t>(n)], lower(hs), n, ks_, a);
    const auto ti = traction(fi, zero, n, a, lambda_, mu_, kp_);
    const auto tp = traction(fp, zero, n, a, lambda_, mu_, kp_);
    const auto ts = traction(zero, gs, n, a, lambda_, mu_, kp_);
    const Complex det = tp[0] * ts[1] - ts[0] * tp[1];
    const Complex An = (-ti[0] * ts[1] + ts[0] * ti[1]) / det;
    const Complex Bn = (-tp[0] * ti[1] + ti[0] * tp[1]) / det;
    A.push_back(An);
    B.push_back(Bn);
    // Size measured as the displacement scale at the rim.
    const double size = std::max(std::abs(An * kp_ * hp[static_cast<std::size_t>(n)]), std::abs(Bn * ks_ * hs[static_cast<std::size_t>(n)]));
    largest = std::max(largest, size);
    if (params_.n_modes > 0) {
      if (n + 1 == params_.n_modes) {
        used = n + 1;
        break;
      }
    } else if (n > 4 && size <= 1e-12 * largest) {
      used = n + 1;
      break;
    }
  }
  if (params_.n_modes == 0 && used > cap) throw Error("cavity scattering series did not converge within 200 modes");
  A.resize(static_cast<std::size_t>(used));
  B.resize(static_cast<std::size_t>(used));
  a_ = std::move(A);
  b_ = std::move(B);
}

std::array<Complex, 2> CavityScatter::amplitude(double x, double y) const {
  const double dx = x - params_.centre.x, dy = y - params_.centre.y;
  const double r = std::hypot(dx, dy);
  if (r < params_.radius * (1.0 - 1e-12)) throw InvalidArgument("point lies inside the cavity");
  const double th = std::atan2(dy, dx);
  const int nm = modes() - 1;
  const auto hp = hankel_sequence(nm, kp_ * r);
  const auto hs = hankel_sequence(nm, ks_ * r);
  Complex ur = 0.0, ut = 0.0;
  for (int n = 0; n <= nm; ++n) {
    auto lower = [&](const auto& seq) { return n == 0 ? seq[1] : seq[static_cast<std::size_t>(n) - 1]; };
    const Radial f = radial(hp[static_cast<std::size_t>(n)], lower(hp), n, kp_, r);
    const Radial g = radial(hs[static_cast<std::size_t>(n)], lower(hs), n, ks_, r);
    const double c = std::cos(n * th), s = std::sin(n * th);
    const Complex An = a_[static_cast<std::size_t>(n)], Bn = b_[static_cast<std::size_t>(n)];
    ur += (An * f.df + static_cast<double>(n) * Bn * g.f / r) * c;
    ut += (-static_cast<double>(n) * An * f.f / r - Bn * g.df) * s;
  }
  const Complex inc = std::exp(I * kp_ * dx);
  const double ct = std::cos(th), st = std::sin(th);
  return {ur * ct - ut * st + inc, ur * st + ut * ct};
}

Point CavityScatter::evaluate(const std::array<Complex, 2>& amp, double omega, double t, int tderiv) {
  // d^k/dt^k exp(-i w t) = (-i w)^k exp(-i w t).
  const Complex f = std::pow(Complex(0.0, -omega), tderiv) * std::exp(Complex(0.0, -omega * t));
  return {(amp[0] * f).real(), (amp[1] * f).real()};
}

Point CavityScatter::displacement(double x, double y, double t, int tderiv) const {
  return evaluate(amplitude(x, y), omega_, t, tderiv);
}

}  // namespace elastic2d
