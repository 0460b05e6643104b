// SPDX-License-Identifier: Apache-2.0
// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "hrom/assembly.hpp"
#include "hrom/dmd.hpp"
#include "hrom/fom.hpp"
#include "hrom/harness.hpp"
#include "hrom/heston.hpp"

namespace {

using namespace hrom;

// Paper-size European grid at P1 and a coarser one at P2.
const Problem& problem(int which) {
  static const Problem p1 = build_problem(config_from_preset("european-call"));
  static const Problem p2 = [] {
    ExperimentConfig c = config_from_preset("european-call");
    c.cells_v = 24;
    c.cells_x = 48;
    c.degree = 2;
    return build_problem(c);
  }();
  return which == 1 ? p1 : p2;
}

const CoefficientField& field() {
  static const CoefficientField f = coefficients(config_from_preset("european-call").spec.params);
  return f;
}

double smooth(const Point& p) { return std::exp(-p[1] * p[1]) * (1.0 + p[0]); }

void BM_mass(benchmark::State& st) {
  const DGSpace& s = *problem(static_cast<int>(st.range(1))).space;
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? assemble_mass(s) : reference::assemble_mass(s));
}

void BM_stiffness(benchmark::State& st) {
  const DGSpace& s = *problem(static_cast<int>(st.range(1))).space;
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) ? assemble_stiffness(s, field()) : reference::assemble_stiffness(s, field()));
}

void BM_source(benchmark::State& st) {
  const DGSpace& s = *problem(static_cast<int>(st.range(1))).space;
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) ? assemble_source(s, smooth) : reference::assemble_source(s, smooth));
}

void BM_l2_project(benchmark::State& st) {
  const DGSpace& s = *problem(static_cast<int>(st.range(1))).space;
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? l2_project(s, smooth) : reference::l2_project(s, smooth));
}

void BM_loads(benchmark::State& st) {
  const Problem& p = problem(static_cast<int>(st.range(1)));
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) ? precompute_loads(p.system, p.grid)
                                         : reference::precompute_loads(p.system, p.grid));
}

void BM_dmd_reconstruct(benchmark::State& st) {
  static const DMDModel model = [] {
    const Problem& p = problem(1);
    const SnapshotSet s = run_fom(p);
    DmdOptions o;
    o.rank = 20;
    return dmd_exact(s.matrix(true), p.grid.dt, o);
  }();
  const int steps = problem(1).grid.steps;
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) ? reconstruct_trajectory(model, 0, steps + 1)
                                         : reference::reconstruct_trajectory(model, 0, steps + 1));
}

// First argument: 0 serial reference, 1 OpenMP. Second: 1 for P1 96x48, 2 for P2 48x24.
#define HROM_KERNEL(fn) \
  BENCHMARK(fn)->ArgNames({"parallel", "degree"})->ArgsProduct({{0, 1}, {1, 2}})->Unit(benchmark::kMillisecond)

HROM_KERNEL(BM_mass);
HROM_KERNEL(BM_stiffness);
HROM_KERNEL(BM_source);
HROM_KERNEL(BM_l2_project);
HROM_KERNEL(BM_loads);
BENCHMARK(BM_dmd_reconstruct)->ArgNames({"parallel"})->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
