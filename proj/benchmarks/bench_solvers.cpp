#include <benchmark/benchmark.h>

#include <cmath>

#include "turnpike/operators.hpp"
#include "turnpike/optimizer.hpp"

namespace {

using namespace turnpike;

SystemSpec bench_system() {
  Eigen::Matrix2d M;
  M << 0.0, 1.0, 1.0, 0.0;
  return make_constant_system(1.0, -1.0, M, -0.5, 1.0);
}

BoundaryControl bench_control(int n_t) {
  BoundaryControl u(n_t);
  for (int n = 0; n < n_t; ++n) {
    u.plus[n] = std::sin(0.01 * n);
    u.minus[n] = std::cos(0.02 * n);
  }
  return u;
}

void BM_ForwardSolve(benchmark::State& state) {
  const SystemSpec sys = bench_system();
  const int n_x = static_cast<int>(state.range(0));
  const SpaceTimeGrid grid(sys, n_x, 4 * n_x, 4.0, QuadRule::rectangle);
  const BoundaryControl u = bench_control(grid.n_t());
  for (auto _ : state) {
    StateTrajectory traj = forward_solve(sys, grid, u);
    benchmark::DoNotOptimize(traj.plus(grid.n_t(), 0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.n_t()) *
                          (grid.n_x() + 1));
}
BENCHMARK(BM_ForwardSolve)->Arg(64)->Arg(256);

void BM_AdjointApply(benchmark::State& state) {
  const SystemSpec sys = bench_system();
  const int n_x = static_cast<int>(state.range(0));
  const SpaceTimeGrid grid(sys, n_x, 4 * n_x, 4.0, QuadRule::rectangle);
  const BoundaryControl u = bench_control(grid.n_t());
  TraceSignal z(grid.n_t());
  z.plus = u.plus;
  z.minus = u.minus;
  for (auto _ : state) {
    BoundaryControl g = boundary_to_trace_adjoint(sys, grid, z);
    benchmark::DoNotOptimize(g.plus[0]);
  }
}
BENCHMARK(BM_AdjointApply)->Arg(64)->Arg(256);

void BM_SteadySolve(benchmark::State& state) {
  const SystemSpec sys = bench_system();
  const int n_x = static_cast<int>(state.range(0));
  const SpaceTimeGrid grid(sys, n_x, n_x, 1.0, QuadRule::rectangle);
  const Eigen::Vector2d u(1.0, -0.5);
  for (auto _ : state) {
    StaticProfile prof = steady_solve(sys, grid, u);
    benchmark::DoNotOptimize(prof.plus.back());
  }
}
BENCHMARK(BM_SteadySolve)->Arg(64)->Arg(1024);

void BM_SolveDynamic(benchmark::State& state) {
  const SystemSpec sys = bench_system();
  const QuadraticCost cost =
      cost_from_tracking(0.5, Eigen::Vector2d(1.0, 0.5));
  const SpaceTimeGrid grid(sys, 32, 256, 8.0, QuadRule::rectangle);
  CgOptions opts;
  opts.tol = 1e-8;
  for (auto _ : state) {
    DynamicSolution sol = solve_dynamic(cost, sys, grid, opts);
    benchmark::DoNotOptimize(sol.objective);
  }
}
BENCHMARK(BM_SolveDynamic);

}  // namespace

BENCHMARK_MAIN();
