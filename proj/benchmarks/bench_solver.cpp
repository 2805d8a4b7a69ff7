#include <benchmark/benchmark.h>

#include "emqs/formulations.hpp"
#include "emqs/operators.hpp"
#include "emqs/solvers.hpp"
#include "test_helpers.hpp"

using namespace emqs;
using emqs::testing::make_bar_case;

namespace {

constexpr double kOmega = 2.0 * M_PI * 1e7;

void BM_BuildOperators(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto c = make_bar_case(n, 100.0, 0.0, 1e-2);
  for (auto _ : state) {
    OperatorSet ops = build_operators(c.grid, c.materials);
    benchmark::DoNotOptimize(ops.m_nu.data());
  }
  state.SetItemsProcessed(state.iterations() * c.grid.n_edges());
}

void BM_Assemble(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto c = make_bar_case(n, 100.0, 0.0, 1e-2);
  for (auto _ : state) {
    auto sys = assemble_fd("symmetric", c.grid, c.ops, c.exc, kOmega);
    benchmark::DoNotOptimize(sys.matrix.valuePtr());
  }
}

void BM_SolveDirect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto c = make_bar_case(n, 100.0, 0.0, 1e-2);
  auto sys = assemble_fd("symmetric", c.grid, c.ops, c.exc, kOmega);
  for (auto _ : state) {
    SolveReport rep;
    VecC x = solve_direct(sys, rep);
    benchmark::DoNotOptimize(x.data());
  }
  state.counters["dofs"] = sys.dim();
}

void BM_SolveBlockTriangular(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto c = make_bar_case(n, 100.0, 0.0, 1e-2);
  auto sys = assemble_fd("tsm", c.grid, c.ops, c.exc, kOmega);
  for (auto _ : state) {
    SolveReport rep;
    VecC x = block_back_substitute(sys, rep);
    benchmark::DoNotOptimize(x.data());
  }
  state.counters["dofs"] = sys.dim();
}

void BM_TimeStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto c = make_bar_case(n, 100.0, 1.0, 0.0);
  TimeDomainSystem td(c.grid, c.ops, c.exc, 1e-9);
  Eigen::SparseLU<SpMatC> lu;
  SpMatC A = td.step_system().matrix;
  A.makeCompressed();
  lu.compute(A);
  VecC a = VecC::Zero(c.grid.n_edges());
  VecC phi = VecC::Zero(c.grid.n_nodes());
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-9;
    const Complex ps(std::cos(kOmega * t), 0.0);
    VecC rhs = td.build_rhs(a, phi, VecC(), ps, Complex(0.0, 0.0));
    VecC x = lu.solve(rhs);
    td.expand(x, ps, Complex(0.0, 0.0), a, phi);
    benchmark::DoNotOptimize(a.data());
  }
}

BENCHMARK(BM_BuildOperators)->Arg(8)->Arg(16);
BENCHMARK(BM_Assemble)->Arg(6)->Arg(10);
BENCHMARK(BM_SolveDirect)->Arg(6)->Arg(10);
BENCHMARK(BM_SolveBlockTriangular)->Arg(6)->Arg(10);
BENCHMARK(BM_TimeStep)->Arg(6)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
