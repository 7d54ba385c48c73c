#include <benchmark/benchmark.h>

#include <cmath>

#include "elastic2d/cavity_scatter.hpp"
#include "elastic2d/mesh.hpp"
#include "elastic2d/sbp_operators.hpp"
#include "elastic2d/sbp_solver.hpp"
#include "elastic2d/scene.hpp"
#include "elastic2d/svs_solver.hpp"

using namespace elastic2d;

namespace {

SceneGeometry cavity_scene(BoundaryKind outer) {
  SceneGeometry s;
  s.x_min = -3;
  s.x_max = 3;
  s.y_min = -3;
  s.y_max = 3;
  s.cavities = {{{0, 0}, 1.0}};
  s.materials = {material_from_speeds(1.0, 0.5, 1.0)};
  s.outer = outer;
  return s;
}

void BM_D1Apply(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const int n = 1024;
  auto ops = SbpOperators::build(order, n);
  std::vector<double> u(n), d(n);
  for (int i = 0; i < n; ++i) u[i] = std::sin(0.01 * i);
  for (auto _ : state) {
    ops->apply_d1(u.data(), 1, d.data(), 1);
    benchmark::DoNotOptimize(d.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_D1Apply)->Arg(4)->Arg(6)->Arg(8);

void BM_SbpStep(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  SbpSolver s(scene_mesh(cavity_scene(BoundaryKind::Radiation), h, SbpOperators::min_size(8)));
  const auto& M = s.mesh();
  s.start(0.0, s.stable_time_step(), [&M](int b, std::size_t k, double) {
    const double x = M.blocks[b].X[k] - 1.5, y = M.blocks[b].Y[k];
    return Point{std::exp(-10 * (x * x + y * y)), 0.0};
  });
  for (auto _ : state) s.step();
  state.SetItemsProcessed(state.iterations() * static_cast<long>(M.node_count()));
}
BENCHMARK(BM_SbpStep)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_SvsStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double h = 6.0 / (n - 1);
  SvsOptions o;
  o.sponge_width = 0.5;
  SvsSolver s(rasterize_scene(cavity_scene(BoundaryKind::Radiation), CartesianGrid{{-3, -3}, n, n, h, h}, AirProperties{}), o);
  s.vx()(n / 4, n / 2) = 1.0;
  s.start(0.0, cfl_dt(s.raster(), 0.9));
  for (auto _ : state) s.step();
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n) * n);
}
BENCHMARK(BM_SvsStep)->Arg(289)->Arg(577)->Unit(benchmark::kMillisecond);

void BM_CavityAmplitude(benchmark::State& state) {
  CavityScatter cs(CavityScatterParams{});
  double x = 1.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cs.amplitude(x, 0.7));
    x = x > 3.0 ? 1.1 : x + 1e-3;
  }
}
BENCHMARK(BM_CavityAmplitude);

}  // namespace
BENCHMARK_MAIN();
