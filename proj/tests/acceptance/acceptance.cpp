// Acceptance checks. One line per criterion:
//   PASS|FAIL <group>.<criterion>: <measured> <relation> <bound> [details]
// Usage: elastic2d_acceptance <group> [--nightly]
// Groups: verification operators mms energy arrivals tunnel oracle
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "elastic2d/cavity_scatter.hpp"
#include "elastic2d/compare.hpp"
#include "elastic2d/curve.hpp"
#include "elastic2d/error.hpp"
#include "elastic2d/experiment.hpp"
#include "elastic2d/manufactured.hpp"
#include "elastic2d/mesh.hpp"
#include "elastic2d/norms.hpp"
#include "elastic2d/sbp_operators.hpp"
#include "elastic2d/sbp_solver.hpp"
#include "elastic2d/seismogram.hpp"
#include "elastic2d/snapshot.hpp"
#include "elastic2d/sources.hpp"
#include "fd_oracle.hpp"
#include "sbp_checks.hpp"
#include "svs_checks.hpp"

namespace fs = std::filesystem;
using namespace elastic2d;

namespace {

int g_failures = 0;

void report(bool pass, const std::string& name, const char* fmt, ...) __attribute__((format(printf, 3, 4)));

void report(bool pass, const std::string& name, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), buf);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path run_root() { return fs::path(output_root(ELASTIC2D_ACCEPTANCE_OUT)); }

ExperimentConfig config(const std::string& name) {
  return load_config((fs::path(ELASTIC2D_CONFIG_DIR) / (name + ".json")).string());
}

RunResult run(const ExperimentConfig& c, bool keep_snapshots = false) {
  RunOptions o;
  o.keep_snapshots = keep_snapshots;
  const auto dir = run_root() / c.name;
  auto r = run_experiment(c, dir.string(), o);
  std::printf("  ran %s: %zu unknowns, dt %.4g, %ld steps, %.0f s -> %s\n", c.name.c_str(), r.unknowns, r.dt, r.steps,
              r.wall_seconds, dir.string().c_str());
  std::fflush(stdout);
  return r;
}

const Material kRock = material_from_speeds(std::sqrt(3.0), 1.0, 1.0);

// ---------------------------------------------------------------------------

void verification(bool nightly) {
  VerificationOptions o;
  o.t_end = nightly ? 10.0 : 2.5;
  o.verbose = true;
  const auto r = run_verification(o);
  write_verification(r, (run_root() / (nightly ? "verification_nightly" : "verification")).string());
  const std::string tag = nightly ? "verification.nightly" : "verification";
  const double target_h = 1.0 / 96.0;
  report(std::abs(r.h - target_h) <= 1e-12 * target_h, tag + ".resolution", "h = %.10g, 12 ppw of the S wavelength 1/8 is %.10g",
         r.h, target_h);
  std::size_t worst = 0;
  for (std::size_t k = 0; k < r.errors.size(); ++k)
    if (r.errors[k] > r.errors[worst]) worst = k;
  const double tmax = r.times.empty() ? 0.0 : r.times.back();
  report(r.max_error() <= 0.01 && std::abs(tmax - o.t_end) < 1e-9, tag + ".relative_error",
         "max over %zu steps %.4g <= 0.01 (worst at t = %.4f, %zu nodes, %d modes)", r.errors.size(), r.max_error(),
         r.times.empty() ? 0.0 : r.times[worst], r.nodes, r.modes);
  if (!nightly) report(r.wall_seconds <= 600.0, tag + ".runtime", "%.0f s <= 600 s", r.wall_seconds);
}

// ---------------------------------------------------------------------------

void operators() {
  double identity = 0.0;
  double d1_interior = 0.0, d1_boundary = 0.0, d2 = 0.0;
  for (int order : {4, 6, 8})
    for (int n : {SbpOperators::min_size(order), 41, 100}) {
      const auto ops = SbpOperators::build(order, n);
      const auto D = ops->d1_matrix();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double q = ops->norm(i) * D[static_cast<std::size_t>(i) * n + j] +
                           ops->norm(j) * D[static_cast<std::size_t>(j) * n + i];
          const double b = (i == j && i == 0) ? -1.0 : (i == j && i == n - 1) ? 1.0 : 0.0;
          identity = std::max(identity, std::abs(q - b));
        }
      // polynomials on [-1, 1]: D1 exact to degree `order` inside and
      // order/2 at the closures, D2 exact to degree order/2 everywhere
      const double hx = 2.0 / (n - 1);
      std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
      for (int q = 0; q <= order; ++q) {
        std::vector<double> u(static_cast<std::size_t>(n)), du(u.size()), ddu(u.size());
        for (int i = 0; i < n; ++i) u[i] = std::pow(-1.0 + i * hx, q);
        ops->apply_d1(u.data(), 1, du.data(), 1);
        ops->apply_d2(ones.data(), u.data(), ddu.data());
        for (int i = 0; i < n; ++i) {
          const double x = -1.0 + i * hx;
          const double e1 = std::abs(du[i] / hx - (q ? q * std::pow(x, q - 1) : 0.0));
          const bool closure = i < ops->closure_rows() || i >= n - ops->closure_rows();
          if (!closure) d1_interior = std::max(d1_interior, e1);
          if (q <= order / 2) {
            d1_boundary = std::max(d1_boundary, e1);
            d2 = std::max(d2, std::abs(ddu[i] / (hx * hx) - (q > 1 ? q * (q - 1) * std::pow(x, q - 2) : 0.0)));
          }
        }
      }
    }
  report(identity <= 1e-12, "operators.sbp_identity", "max |H D + (H D)^T - B| = %.3g <= 1e-12 (orders 4, 6, 8)", identity);
  const double worst = std::max({d1_interior, d1_boundary, d2});
  report(worst <= 1e-9, "operators.polynomial_exactness",
         "D1 interior %.2g, D1 closure %.2g, D2 %.2g <= 1e-9 on [-1, 1]", d1_interior, d1_boundary, d2);

  auto freestream = [](const MultiblockMesh& mesh, const char* name) {
    double metric = 0.0, translation = 0.0;
    for (int order : {4, 6, 8}) {
      SbpOptions o;
      o.order = order;
      SbpSolver s(mesh, o);
      metric = std::max(metric, checks::metric_freestream(s));
      translation = std::max(translation, checks::rigid_motion_residual(s, 0.8, -0.6, 0.0));
    }
    report(std::max(metric, translation) <= 1e-10, std::string("operators.freestream_") + name,
           "metric identity %.3g, uniform translation %.3g <= 1e-10", metric, translation);
  };
  freestream(annulus_in_rectangle({0.2, -0.1}, 1.0, -2.5, 2.7, -2.4, 2.6, 0.08, kRock, BoundaryKind::TractionFree,
                                  SbpOperators::min_size(8)),
             "ring");
  freestream(checks::rotated_block_mesh(48, 0.6, 0.2, BoundaryKind::TractionFree, kRock), "rotated_block");
}

// ---------------------------------------------------------------------------

// Max nodal error of the manufactured solution at T on a cavity scene
// (Dirichlet box, traction data on the rim).
double sbp_mms_error(double h, double T) {
  SceneGeometry sc;
  sc.x_min = -3;
  sc.x_max = 3;
  sc.y_min = -3;
  sc.y_max = 3;
  sc.cavities = {{{0, 0}, 1.0}};
  sc.materials = {kRock};
  sc.outer = BoundaryKind::Dirichlet;
  SbpSolver s(scene_mesh(sc, h, SbpOperators::min_size(8)));
  const auto z = mms_pair(kRock);
  const auto& M = s.mesh();
  auto at = [&M](int b, std::size_t k) { return Point{M.blocks[b].X[k], M.blocks[b].Y[k]}; };
  s.set_dirichlet_data([&](int b, std::size_t k, double t, int d) {
    const Point p = at(b, k);
    return z.displacement(p.x, p.y, t, d);
  });
  s.set_traction_data([&](int b, std::size_t k, double t, int d) {
    const Point p = at(b, k);
    const double r = std::hypot(p.x, p.y);
    return z.traction(p.x, p.y, t, {-p.x / r, -p.y / r}, d);
  });
  s.add_load([&](double t, int d, Field& load) {
    for (int b = 0; b < s.block_count(); ++b) {
      const auto& q = s.quadrature(b);
      for (std::size_t k = 0; k < q.size(); ++k) {
        const Point p = at(b, k);
        const Point f = z.force(p.x, p.y, t, d);
        load[b].u.data()[k] += q.data()[k] * f.x;
        load[b].v.data()[k] += q.data()[k] * f.y;
      }
    }
  });
  const double dt0 = s.stable_time_step();
  const long n = static_cast<long>(std::ceil(T / dt0));
  s.start(0.0, T / n, [&](int b, std::size_t k, double t) {
    const Point p = at(b, k);
    return z.displacement(p.x, p.y, t);
  });
  for (long k = 0; k < n; ++k) s.step();
  double err = 0.0;
  for (int b = 0; b < s.block_count(); ++b)
    for (std::size_t k = 0; k < M.blocks[b].X.size(); ++k) {
      const Point p = at(b, k);
      const Point e = z.displacement(p.x, p.y, s.time());
      err = std::max({err, std::abs(e.x - s.displacement()[b].u.data()[k]), std::abs(e.y - s.displacement()[b].v.data()[k])});
    }
  return err;
}

void mms() {
  const auto t0 = std::chrono::steady_clock::now();
  const double e1 = sbp_mms_error(0.05, 0.5), e2 = sbp_mms_error(0.025, 0.5), e3 = sbp_mms_error(0.0125, 0.5);
  const auto so = convergence_order(e1, e2, e3);
  report(so.monotone && std::min(so.coarse, so.fine) >= 4.0, "mms.sbp_order",
         "orders %.2f, %.2f >= 4.0 (errors %.3g %.3g %.3g, h = 0.05/0.025/0.0125, order 8)", so.coarse, so.fine, e1, e2, e3);
  const double v1 = checks::svs_mms_error(16, 1.0, 0.25), v2 = checks::svs_mms_error(32, 1.0, 0.25),
               v3 = checks::svs_mms_error(64, 1.0, 0.25);
  const auto vo = convergence_order(v1, v2, v3);
  report(vo.monotone && std::min(vo.coarse, vo.fine) >= 3.5, "mms.svs_spatial_order",
         "orders %.2f, %.2f >= 3.5 with dt = h^2/4 (errors %.3g %.3g %.3g)", vo.coarse, vo.fine, v1, v2, v3);
  const double wall = seconds_since(t0);
  report(wall <= 300.0, "mms.runtime", "%.0f s <= 300 s", wall);
}

// ---------------------------------------------------------------------------

void energy() {
  {
    SceneGeometry sc;
    sc.x_min = -3;
    sc.x_max = 3;
    sc.y_min = -3;
    sc.y_max = 3;
    sc.cavities = {{{0, 0}, 1.0}};
    sc.materials = {kRock};
    sc.outer = BoundaryKind::TractionFree;
    SbpSolver s(scene_mesh(sc, 0.06, SbpOperators::min_size(8)));
    const auto& M = s.mesh();
    s.start(0.0, s.stable_time_step(), [&M](int b, std::size_t k, double) {
      const double x = M.blocks[b].X[k] - 1.6, y = M.blocks[b].Y[k] - 1.2;
      const double g = std::exp(-8 * (x * x + y * y));
      return Point{g, 0.5 * g};
    });
    const double e0 = s.energy();
    for (int k = 0; k < 1000; ++k) s.step();
    const double drift = std::abs(s.energy() - e0) / e0;
    report(drift <= 1e-6, "energy.sbp_drift", "relative drift %.3g over 1000 steps <= 1e-6 (%zu nodes, traction free)", drift,
           M.node_count());
  }
  {
    // dipole in a radiating box; after the pulse ends energy may only fall
    SceneGeometry sc;
    sc.x_min = -3;
    sc.x_max = 3;
    sc.y_min = -3;
    sc.y_max = 3;
    sc.cavities = {{{0, 0}, 1.0}};
    sc.materials = {kRock};
    sc.outer = BoundaryKind::Radiation;
    SbpSolver s(scene_mesh(sc, 0.06, SbpOperators::min_size(8)));
    SourceSpec src;
    src.position = {-2.0, 1.5};
    src.omega = 2.0;
    src.moment_order = 7;
    attach_sbp_source(s, src);
    s.start(0.0, s.stable_time_step());
    const double t_off = 1.0 / src.omega;
    while (s.time() < t_off + s.dt()) s.step();
    double prev = s.energy();
    const double e_off = prev;
    double worst = -1e300;
    long steps = 0;
    while (s.time() < 4.0) {
      s.step();
      const double e = s.energy();
      worst = std::max(worst, (e - prev) / e_off);
      prev = e;
      ++steps;
    }
    report(worst <= 1e-10 && prev < e_off, "energy.radiation_nonincreasing",
           "largest per-step increase %.3g of E(shutoff) <= 1e-10 over %ld steps, E fell to %.3g of E(shutoff)", worst,
           steps, prev / e_off);
  }
  {
    const auto c = config("cavity_svs");
    const auto r = run(c);
    const double t_off = 1.0 / c.sources.at(0).omega;
    double e_off = -1.0, e_max = 0.0;
    for (std::size_t k = 0; k < r.energy.size(); ++k) {
      if (r.energy_times[k] < t_off) continue;
      if (e_off < 0.0) e_off = r.energy[k];
      e_max = std::max(e_max, r.energy[k]);
    }
    const bool ok = r.stable && std::abs(r.energy_times.back() - 10.0) < 1e-9 && e_off > 0.0 && e_max <= e_off * (1 + 1e-9);
    report(ok, "energy.svs_cavity_bounded",
           "run to t = %.2f %s, max E after the pulse %.6g <= E(%.2f) = %.6g, max |u| %.3g", r.energy_times.back(),
           r.stable ? "stable" : r.message.c_str(), e_max, t_off, e_off, r.max_displacement);
  }
}

// ---------------------------------------------------------------------------

void arrivals() {
  const auto a = run(config("cavity_sbp"));
  const auto b = run(config("cavity_svs"));
  if (!a.stable || !b.stable) {
    report(false, "arrivals.runs", "sbp %s, svs %s", a.message.c_str(), b.message.c_str());
    return;
  }
  const auto rep = compare_runs(a.seismograms, b.seismograms, TimeWindow{6.0, 8.0});
  std::printf("%s", rep.to_text().c_str());
  for (const char* label : {"N", "S", "E", "W"}) {
    const auto& r = rep.at(label);
    report(r.arrival_relative_delta <= 0.02, std::string("arrivals.first_arrival_") + label,
           "sbp %.4f, svs %.4f, relative difference %.4f <= 0.02", r.arrival_a, r.arrival_b, r.arrival_relative_delta);
  }
  // straight-ray oracle: the P front leaves the source during [0, 1/omega]
  const auto c = config("cavity_sbp");
  const auto& src = c.sources.at(0);
  const double cp = c.scene.materials.at(0).cp(), pulse = 1.0 / src.omega;
  for (const auto& rc : c.receivers) {
    if (rc.label != "N" && rc.label != "W") continue;
    const double ray = std::hypot(rc.position.x - src.position.x, rc.position.y - src.position.y) / cp;
    const auto& r = rep.at(rc.label);
    const bool ok = std::min(r.arrival_a, r.arrival_b) >= ray && std::max(r.arrival_a, r.arrival_b) <= ray + pulse;
    report(ok, "arrivals.ray_oracle_" + rc.label, "sbp %.4f, svs %.4f within [%.4f, %.4f] (ray time, plus pulse length)",
           r.arrival_a, r.arrival_b, ray, ray + pulse);
  }
  {
    const auto &n = rep.at("N"), &s = rep.at("S"), &e = rep.at("E");
    report(n.arrival_a < std::min(s.arrival_a, e.arrival_a) && n.arrival_b < std::min(s.arrival_b, e.arrival_b),
           "arrivals.north_before_south_east", "sbp N %.4f < S %.4f, E %.4f; svs N %.4f < S %.4f, E %.4f", n.arrival_a,
           s.arrival_a, e.arrival_a, n.arrival_b, s.arrival_b, e.arrival_b);
  }
  const auto& e = rep.at("E");
  report(e.energy_b_ux > e.energy_a_ux, "arrivals.late_energy_E",
         "ux energy in [6, 8]: svs %.4g > sbp %.4g (uy: svs %.4g, sbp %.4g)", e.energy_b_ux, e.energy_a_ux, e.energy_b_uy,
         e.energy_a_uy);
}

// ---------------------------------------------------------------------------

void tunnel() {
  const std::vector<double> wanted{0.6, 2.8, 3.6, 5.6};
  std::map<std::string, Snapshot> at_28;
  for (const char* name : {"tunnel_sbp", "tunnel_svs"}) {
    const auto c = config(name);
    const auto r = run(c);
    int found = 0;
    std::string missing;
    for (double t : wanted) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "t%08.4f.txt", t);
      const auto path = run_root() / c.name / "snapshots" / stem;
      try {
        auto snap = read_snapshot(path.string());
        if (std::abs(snap.time - t) < 1e-9 && snap.max_abs("magnitude") > 0.0) ++found;
        else missing += " " + std::to_string(t);
        if (std::abs(t - 2.8) < 1e-9) at_28[c.name] = std::move(snap);
      } catch (const Error&) {
        missing += " " + std::to_string(t);
      }
    }
    report(r.stable && found == 4, std::string("tunnel.snapshots_") + solver_name(c.solver),
           "%d of 4 nonzero snapshots at t = 0.6, 2.8, 3.6, 5.6%s%s", found, missing.empty() ? "" : "; missing", missing.c_str());
  }
  if (at_28.size() != 2) {
    report(false, "tunnel.rayleigh_left_wall", "snapshots at t = 2.8 unavailable");
    return;
  }
  const auto wall = BoundaryCurve::arc({0.0, 0.0}, 1.0, 0.0, 2 * std::numbers::pi);
  const double es = rayleigh_energy(at_28.at("tunnel_sbp"), wall, 0.25);
  const double ev = rayleigh_energy(at_28.at("tunnel_svs"), wall, 0.25);
  report(es > ev, "tunnel.rayleigh_left_wall", "|u|^2 within 0.25 of the left tunnel wall at t = 2.8: sbp %.4g > svs %.4g",
         es, ev);
}

// ---------------------------------------------------------------------------

void oracle() {
  CavityScatter cs(CavityScatterParams{});
  std::mt19937_64 rng(20240611);
  VerificationOptions box;
  std::uniform_real_distribution<double> ux(box.x_min, box.x_max), uy(box.y_min, box.y_max);
  double pde = 0.0;
  int n = 0;
  while (n < 1000) {
    const double x = ux(rng), y = uy(rng);
    if (std::hypot(x, y) < 1.0 + 0.01) continue;
    pde = std::max(pde, fd::cavity_pde_residual(cs, x, y, 1e-3));
    ++n;
  }
  report(pde <= 1e-8, "oracle.cavity_pde", "max relative residual %.3g at %d random points <= 1e-8 (%d modes)", pde, n,
         cs.modes());
  double rim = 0.0;
  for (int k = 0; k < 360; ++k) rim = std::max(rim, fd::cavity_rim_traction(cs, 2 * std::numbers::pi * (k + 0.37) / 360, 2e-4));
  report(rim <= 1e-8, "oracle.rim_traction_free", "max relative traction %.3g at 360 rim points <= 1e-8", rim);
  const auto ms = mms_pair(kRock);
  std::uniform_real_distribution<double> u(-3.0, 3.0), ut(0.0, 1.0);
  double res = 0.0;
  for (int k = 0; k < 1000; ++k) res = std::max(res, fd::mms_residual(ms, u(rng), u(rng), ut(rng), 1e-2));
  report(res <= 1e-10, "oracle.mms_residual", "max relative residual %.3g at 1000 random points <= 1e-10", res);
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<void(bool)>> groups{
      {"verification", verification},
      {"operators", [](bool) { operators(); }},
      {"mms", [](bool) { mms(); }},
      {"energy", [](bool) { energy(); }},
      {"arrivals", [](bool) { arrivals(); }},
      {"tunnel", [](bool) { tunnel(); }},
      {"oracle", [](bool) { oracle(); }},
  };
  if (argc < 2 || !groups.count(argv[1])) {
    std::fprintf(stderr, "usage: %s <group> [--nightly]\ngroups:", argv[0]);
    for (const auto& [k, _] : groups) std::fprintf(stderr, " %s", k.c_str());
    std::fprintf(stderr, "\n");
    return 2;
  }
  const bool nightly = argc > 2 && std::string(argv[2]) == "--nightly";
  apply_thread_override();
  try {
    groups.at(argv[1])(nightly);
  } catch (const std::exception& e) {
    report(false, std::string(argv[1]) + ".exception", "%s", e.what());
  }
  return g_failures == 0 ? 0 : 1;
}
