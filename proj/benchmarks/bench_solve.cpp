#include <benchmark/benchmark.h>

#include "shell/bench.hpp"
#include "shell/solver.hpp"

using namespace shell;

namespace {

void BM_FactorCondensedTangent(benchmark::State& st) {
  const BenchmarkCase& c = find_case("slit_annulus");
  GenParams g;
  g.nx = static_cast<int>(st.range(0));
  g.ny = 8 * g.nx;
  CaseSetup cs = c.build(g, c.default_params);
  const Model model(cs.mesh, cs.material, cs.problem);
  State s = model.initial_state();
  s.lambda = 1.0;
  const AssembledSystem sys = model.assemble(s);
  for (auto _ : st) {
    LinearSolver ls;
    ls.factor(sys.K);
    benchmark::DoNotOptimize(ls.solve(-sys.residual).data());
  }
  st.counters["free_dofs"] = model.free_count();
}
BENCHMARK(BM_FactorCondensedTangent)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

// Full load-stepped run of the end-shear cantilever.
void BM_EndShearRun(benchmark::State& st) {
  RunOverrides o;
  o.steps = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(run_case("cant_shear", o).rows.size());
}
BENCHMARK(BM_EndShearRun)->Arg(5)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
