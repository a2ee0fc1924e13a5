#include <benchmark/benchmark.h>

#include <cmath>

#include "kpplab/kpplab.hpp"

using namespace kpplab;

namespace {

void BM_ExplicitStep1D(benchmark::State& state) {
  const double h = 100.0 / static_cast<double>(state.range(0));
  const Problem p = builtin_problem("heterogeneous-kpp");
  const Grid g = Grid::symmetric(1, 50.0, h);
  const TimeIntegrator integ(g, p.coefficient, p.reaction, Scheme::explicit_euler, std::nullopt);
  GridFunction u = make_initial(InitialCondition::bump(5.0, 0.8), g);
  for (auto _ : state) {
    integ.step(u.values(), integ.dt());
    benchmark::DoNotOptimize(u.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_ExplicitStep1D)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_ImexStep1D(benchmark::State& state) {
  const Problem p = builtin_problem("homogeneous-kpp");
  const Grid g = Grid::symmetric(1, 50.0, 100.0 / static_cast<double>(state.range(0)));
  const TimeIntegrator integ(g, p.coefficient, p.reaction, Scheme::imex, 0.01);
  GridFunction u = make_initial(InitialCondition::bump(5.0, 0.8), g);
  for (auto _ : state) {
    integ.step(u.values(), integ.dt());
    benchmark::DoNotOptimize(u.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_ImexStep1D)->Arg(1000)->Arg(10000);

void BM_ExplicitStep2D(benchmark::State& state) {
  const Problem p = builtin_problem("homogeneous-kpp");
  const Grid g = Grid::symmetric(2, 10.0, 20.0 / static_cast<double>(state.range(0)));
  const TimeIntegrator integ(g, p.coefficient, p.reaction, Scheme::explicit_euler, std::nullopt);
  GridFunction u = make_initial(InitialCondition::bump(2.0, 0.8), g);
  for (auto _ : state) {
    integ.step(u.values(), integ.dt());
    benchmark::DoNotOptimize(u.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_ExplicitStep2D)->Arg(100)->Arg(400);

void BM_HalfLineGreen(benchmark::State& state) {
  const HalfLineParams pp{1.0, 1.0};
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(half_line_green(pp, 2.0, x, 1.3));
    benchmark::DoNotOptimize(half_line_green_dt(pp, 2.0, x, 1.3));
    x = x < 20.0 ? x + 0.01 : 0.1;
  }
}
BENCHMARK(BM_HalfLineGreen);

void BM_GreenScan(benchmark::State& state) {
  GreenScanSpec spec;
  spec.diffusivities = {1.0};
  for (auto _ : state) benchmark::DoNotOptimize(scan_green_dt(spec).violations);
  state.SetItemsProcessed(state.iterations() * 20 * 50 * 100);
}
BENCHMARK(BM_GreenScan)->Unit(benchmark::kMillisecond);

void BM_HalfLineQuadrature(benchmark::State& state) {
  const Grid g = Grid::interval(0.0, 0.05, static_cast<std::size_t>(state.range(0)));
  GridFunction v0(g);
  for (std::size_t k = 0; k < g.size(); ++k) v0[k] = g.coord(k) * std::exp(-g.coord(k));
  for (auto _ : state) benchmark::DoNotOptimize(halfline_quadrature({1.0, 1.0}, v0, 1.0).max());
}
BENCHMARK(BM_HalfLineQuadrature)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_FundamentalSolution(benchmark::State& state) {
  const Grid g = Grid::symmetric(1, 40.0, 0.05);
  const auto a = CoefficientField::sinusoidal(1.0, 0.5, 5.0);
  const double times[] = {1.0, 5.0};
  for (auto _ : state) benchmark::DoNotOptimize(fundamental_solution(a, times, Point{}, g).mass.back());
}
BENCHMARK(BM_FundamentalSolution)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
