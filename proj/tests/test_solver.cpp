#include <gtest/gtest.h>

#include <cmath>

#include "shell/bench.hpp"
#include "shell/generators.hpp"
#include "shell/solver.hpp"

using namespace shell;

namespace {

Model case_model(const std::string& name, int order = 1) {
  const BenchmarkCase& c = find_case(name);
  CaseSetup cs = c.build(parse_grid(c.default_grid), c.default_params);
  return Model(cs.mesh, cs.material, cs.problem, ModelOptions{order});
}

double tip(const Model& m, const State& s, int comp) { return m.vertex_displacement(s, m.probe_vertex("A"))[comp]; }

}  // namespace

TEST(Newton, ZeroLoadIsAlreadyConverged) {
  const Model model = case_model("cant_shear");
  State s = model.initial_state();
  const NewtonReport rep = newton_solve(model, s);
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.iterations, 1);
  EXPECT_EQ(s.retained.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Newton, TerminalConvergenceIsQuadratic) {
  const Model model = case_model("cant_shear");
  State s = model.initial_state();
  s.lambda = 0.05;
  newton_solve(model, s);
  s.lambda = 0.1;
  const NewtonReport rep = newton_solve(model, s);
  ASSERT_TRUE(rep.converged);
  // Pairs inside the quadratic basin and above the roundoff floor.
  int pairs = 0;
  for (std::size_t i = 0; i + 1 < rep.history.size(); ++i) {
    const double r = rep.history[i], rn = rep.history[i + 1];
    if (r < 1e-2 && rn > 1e-10) {
      EXPECT_LE(rn, 10.0 * r * r) << "iteration " << i;
      ++pairs;
    }
  }
  EXPECT_GE(pairs, 1);
  EXPECT_LE(rep.final_residual, 1e-9 * rep.initial_residual + 1e-10);
}

TEST(Newton, FailureLeavesTheStateUntouched) {
  const Model model = case_model("cant_moment");
  State s = model.initial_state();
  s.lambda = 0.5;
  NewtonOptions opt;
  opt.max_iterations = 2;
  const State before = s;
  EXPECT_THROW(newton_solve(model, s, opt), NonConvergence);
  EXPECT_EQ(s.retained, before.retained);
  EXPECT_EQ(s.lambda, before.lambda);
}

TEST(LoadSteps, EndMomentFirstStep) {
  const Model model = case_model("cant_moment");
  State s = model.initial_state();
  LoadStepOptions opt;
  opt.steps = 20;
  std::vector<double> w;
  const std::vector<StepRecord> rec =
      run_load_steps(model, s, opt, [&](const StepRecord&, const State& st) { w.push_back(tip(model, st, 2)); });
  ASSERT_EQ(rec.size(), 21u);
  ASSERT_EQ(w.size(), 21u);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_NEAR(rec[1].lambda, 0.05, 1e-15);
  EXPECT_NEAR(w[1], 1.870, 0.005);
  for (std::size_t i = 1; i < rec.size(); ++i) EXPECT_GT(rec[i].lambda, rec[i - 1].lambda);
}

TEST(LoadSteps, RejectsZeroSteps) {
  const Model model = case_model("cant_shear");
  State s = model.initial_state();
  LoadStepOptions opt;
  opt.steps = 0;
  EXPECT_THROW(run_load_steps(model, s, opt), ConfigError);
}

TEST(LoadSteps, StepCountDoesNotChangeTheConvergedShape) {
  // Dead loads with the clamped normal fixed: the equilibrium path is
  // step independent up to the Newton tolerance.
  const Model model = case_model("cant_shear");
  double w[2];
  for (int i = 0; i < 2; ++i) {
    State s = model.initial_state();
    LoadStepOptions opt;
    opt.steps = i == 0 ? 4 : 8;
    run_load_steps(model, s, opt);
    w[i] = tip(model, s, 2);
  }
  EXPECT_NEAR(w[0], w[1], 1e-6 * std::abs(w[1]));
}
