#include <benchmark/benchmark.h>

#include "shell/generators.hpp"
#include "shell/model.hpp"

using namespace shell;

namespace {

Model twisted(int order, bool locking) {
  GenParams gp;
  gp.nx = 4;
  gp.ny = 24;
  ProblemSpec spec;
  spec.bcs = {{"clamped", BcType::Clamped}};
  spec.loads.edge = {{"tip", {0.0, 0.0, 1.0}}};
  return Model(gen_benchmark("twisted_beam", gp), Material{29e6, 0.22, 0.32}, spec, ModelOptions{order, locking});
}

// Condensed tangent and residual, the per-iteration cost of Newton.
void BM_AssembleCondensed(benchmark::State& st) {
  const Model model = twisted(static_cast<int>(st.range(0)), st.range(1) != 0);
  State s = model.initial_state();
  s.lambda = 1.0;
  for (auto _ : st) benchmark::DoNotOptimize(model.assemble(s));
  st.counters["elements"] = static_cast<double>(model.mesh().elements.size());
  st.counters["free_dofs"] = model.free_count();
}
BENCHMARK(BM_AssembleCondensed)->Args({1, 0})->Args({1, 1})->Args({2, 1})->Args({3, 1})->Unit(benchmark::kMillisecond);

void BM_ElementKernel(benchmark::State& st) {
  const Model model = twisted(static_cast<int>(st.range(0)), true);
  const State s = model.initial_state();
  const Eigen::VectorXd z = model.gather(s, 0);
  ElementEval ev;
  for (auto _ : st) {
    model.element_eval(0, z, s.lagged, 1.0, true, ev);
    benchmark::DoNotOptimize(ev.H.data());
  }
}
BENCHMARK(BM_ElementKernel)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

void BM_Residual(benchmark::State& st) {
  const Model model = twisted(2, true);
  State s = model.initial_state();
  s.lambda = 1.0;
  for (auto _ : st) benchmark::DoNotOptimize(model.assemble(s, false).gradient_norm);
}
BENCHMARK(BM_Residual)->Unit(benchmark::kMillisecond);

}  // namespace
