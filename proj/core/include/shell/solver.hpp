#pragma once

#include <functional>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "shell/model.hpp"

namespace shell {

struct LinearSolveInfo {
  bool used_fallback = false;
  int nonpositive_pivots = 0;
  double min_pivot_ratio = 0.0;  // min |D| / max |D| after symmetric Jacobi scaling
};

// Sparse symmetric factorization with Jacobi scaling, LDL^T first and LU as
// the fallback. Throws SolverError on a singular (under-constrained) system.
class LinearSolver {
 public:
  void factor(const Eigen::SparseMatrix<double>& K);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  // Norm in the Jacobi-scaled variables, used to compare Newton corrections.
  double scaled_norm(const Eigen::VectorXd& x) const;
  const LinearSolveInfo& info() const { return info_; }

 private:
  Eigen::VectorXd d_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool use_lu_ = false;
  LinearSolveInfo info_;
};

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs,
                             LinearSolveInfo* info = nullptr);

struct NewtonOptions {
  int max_iterations = 30;
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  int max_halvings = 10;
  bool update_lagged_each_iteration = false;
  bool verbose = false;  // per-iteration residuals on stderr
};

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  std::vector<double> history;
  int nonpositive_pivots = 0;  // at the last factorization
};

// Solves the stationarity system at s.lambda starting from s. On failure
// throws NonConvergence and leaves s untouched.
NewtonReport newton_solve(const Model& model, State& s, const NewtonOptions& options = {});

struct LoadStepOptions {
  int steps = 20;
  int max_bisections = 5;
  bool update_lagged = true;
  NewtonOptions newton;
};

struct StepRecord {
  int step = 0;
  double lambda = 0.0;
  int newton_iterations = 0;
  int bisections = 0;
  double residual = 0.0;
};

using StepCallback = std::function<void(const StepRecord&, const State&)>;

// Uniform load steps 0, 1/steps, ..., 1 with bisection of a failing
// increment. The callback fires at lambda = 0 and after every target step.
std::vector<StepRecord> run_load_steps(const Model& model, State& s, const LoadStepOptions& options,
                                       const StepCallback& callback = {});

}  // namespace shell
