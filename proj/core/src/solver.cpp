#include "shell/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "shell/error.hpp"

namespace shell {

namespace {

constexpr double kSingularPivot = 1e-14;

}  // namespace

void LinearSolver::factor(const Eigen::SparseMatrix<double>& K) {
  const int n = static_cast<int>(K.rows());
  info_ = {};
  use_lu_ = false;
  d_.resize(n);
  const Eigen::VectorXd diag = K.diagonal();
  for (int i = 0; i < n; ++i) d_[i] = diag[i] != 0.0 ? 1.0 / std::sqrt(std::abs(diag[i])) : 1.0;
  if (n == 0) return;
  const Eigen::SparseMatrix<double> Ks = d_.asDiagonal() * K * d_.asDiagonal();
  ldlt_.compute(Ks);
  if (ldlt_.info() == Eigen::Success) {
    const Eigen::VectorXd D = ldlt_.vectorD();
    const double dmax = D.cwiseAbs().maxCoeff();
    const double dmin = D.cwiseAbs().minCoeff();
    info_.min_pivot_ratio = dmax > 0 ? dmin / dmax : 0.0;
    info_.nonpositive_pivots = static_cast<int>((D.array() <= 0.0).count());
    if (!(dmax > 0.0) || !D.allFinite() || info_.min_pivot_ratio < kSingularPivot)
      throw SolverError("singular tangent: the structure is under-constrained or fully degenerate");
    return;
  }
  use_lu_ = true;
  info_.used_fallback = true;
  lu_.compute(Ks);
  if (lu_.info() != Eigen::Success) throw SolverError("sparse factorization failed: singular tangent");
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& rhs) const {
  if (d_.size() == 0) return Eigen::VectorXd();
  const Eigen::VectorXd bs = d_.cwiseProduct(rhs);
  const Eigen::VectorXd x = use_lu_ ? Eigen::VectorXd(lu_.solve(bs)) : Eigen::VectorXd(ldlt_.solve(bs));
  if (!x.allFinite()) throw SolverError("sparse solve failed: singular tangent");
  return d_.cwiseProduct(x);
}

double LinearSolver::scaled_norm(const Eigen::VectorXd& x) const { return x.cwiseQuotient(d_).norm(); }

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs,
                             LinearSolveInfo* info) {
  LinearSolver ls;
  ls.factor(K);
  if (info) *info = ls.info();
  return ls.solve(rhs);
}

namespace {

bool recoverable(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const DegenerateDeformation&) {
    return true;
  } catch (const ProjectionDegenerate&) {
    return true;
  } catch (const NumericError&) {
    return true;
  } catch (...) {
    return false;
  }
}

void axpy(State& s, double a, const Eigen::VectorXd& dr, const std::vector<Eigen::VectorXd>& dc) {
  s.retained += a * dr;
  for (std::size_t t = 0; t < dc.size(); ++t) s.condensed[t] += a * dc[t];
}

}  // namespace

NewtonReport newton_solve(const Model& model, State& s0, const NewtonOptions& opt) {
  NewtonReport rep;
  State s = s0;
  model.apply_dirichlet(s, s.lambda);
  if (opt.update_lagged_each_iteration) model.update_lagged(s);
  AssembledSystem sys = model.assemble(s);
  const double r0 = sys.gradient_norm;
  rep.initial_residual = r0;
  rep.history.push_back(r0);
  const double tol = std::max(opt.rel_tol * r0, opt.abs_tol);
  const std::vector<int>& fi = model.free_index();

  auto expand = [&](const Eigen::VectorXd& dx) {
    Eigen::VectorXd dr = Eigen::VectorXd::Zero(s.retained.size());
    for (int i = 0; i < static_cast<int>(fi.size()); ++i)
      if (fi[i] >= 0) dr[i] = dx[fi[i]];
    return dr;
  };

  LinearSolver ls;
  for (int it = 0; it <= opt.max_iterations; ++it) {
    if (sys.gradient_norm <= tol) {
      rep.converged = true;
      break;
    }
    if (it == opt.max_iterations) break;
    ls.factor(sys.K);
    rep.nonpositive_pivots = ls.info().nonpositive_pivots;
    if (opt.verbose)
      std::fprintf(stderr, "  newton lambda=%.6g it=%d |r|=%.6e pivots<=0: %d min pivot ratio %.3e\n", s.lambda, it + 1,
                   sys.gradient_norm, ls.info().nonpositive_pivots, ls.info().min_pivot_ratio);
    const Eigen::VectorXd dx = ls.solve(-sys.residual);
    const double dx_norm = ls.scaled_norm(dx);
    const Eigen::VectorXd dr = expand(dx);
    std::vector<Eigen::VectorXd> dc;
    model.recover_condensed(sys, dr, dc);

    // A damped step is accepted when the residual decreases or when the
    // simplified Newton correction, computed with the current factorization,
    // shrinks (affine covariant monotonicity test).
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings && !accepted; ++h, step *= (accepted ? 1.0 : 0.5)) {
      State trial = s;
      axpy(trial, step, dr, dc);
      try {
        if (opt.update_lagged_each_iteration) model.update_lagged(trial);
        AssembledSystem tsys = model.assemble(trial);
        if (!std::isfinite(tsys.gradient_norm)) throw NumericError("non-finite residual");
        const double bar = ls.scaled_norm(ls.solve(-tsys.residual));
        if (tsys.gradient_norm < sys.gradient_norm || bar <= (1.0 - 0.25 * step) * step * dx_norm ||
            bar <= (1.0 - 0.25 * step) * dx_norm) {
          s = std::move(trial);
          sys = std::move(tsys);
          accepted = true;
        } else if (opt.verbose) {
          std::fprintf(stderr, "  newton lambda=%.6g it=%d rejected step=%.3g |r|=%.6e simplified=%.3e full=%.3e\n",
                       s.lambda, it + 1, step, tsys.gradient_norm, bar, dx_norm);
        }
      } catch (...) {
        if (!recoverable(std::current_exception())) throw;
        if (opt.verbose) std::fprintf(stderr, "  newton lambda=%.6g it=%d step=%.3g inadmissible\n", s.lambda, it + 1, step);
      }
      if (accepted) break;
    }
    if (!accepted) break;
    const double step_norm = step * dr.norm();
    rep.iterations = it + 1;
    rep.history.push_back(sys.gradient_norm);
    if (opt.verbose)
      std::fprintf(stderr, "  newton lambda=%.6g it=%d step=%.3g |r|=%.6e\n", s.lambda, it + 1, step,
                   sys.gradient_norm);
    // Roundoff floor: the update no longer changes the solution.
    if (step_norm <= 1e-13 * (1.0 + s.retained.norm()) && sys.gradient_norm <= 1e-6 * std::max(r0, 1.0)) {
      rep.converged = true;
      break;
    }
  }
  rep.final_residual = sys.gradient_norm;
  if (!rep.converged) throw NonConvergence("Newton did not converge at lambda = " + std::to_string(s.lambda));
  s0 = std::move(s);
  return rep;
}

std::vector<StepRecord> run_load_steps(const Model& model, State& s, const LoadStepOptions& opt,
                                       const StepCallback& callback) {
  if (opt.steps < 1) throw ConfigError("number of load steps must be positive");
  std::vector<StepRecord> records;

  StepRecord r0;
  s.lambda = 0.0;
  const NewtonReport rep0 = newton_solve(model, s, opt.newton);
  r0.newton_iterations = rep0.iterations;
  r0.residual = rep0.final_residual;
  records.push_back(r0);
  if (callback) callback(r0, s);

  // Secant predictor from the last two converged states.
  State prev;
  bool have_prev = false;
  for (int i = 1; i <= opt.steps; ++i) {
    const double target = static_cast<double>(i) / opt.steps;
    StepRecord rec;
    rec.step = i;
    rec.lambda = target;
    double reached = s.lambda;
    double inc = target - reached;
    int depth = 0;
    while (reached < target - 1e-14) {
      const double next = std::min(target, reached + inc);
      State trial = s;
      if (have_prev && s.lambda > prev.lambda) {
        const double w = (next - s.lambda) / (s.lambda - prev.lambda);
        trial.retained += w * (s.retained - prev.retained);
        for (std::size_t t = 0; t < trial.condensed.size(); ++t)
          trial.condensed[t] += w * (s.condensed[t] - prev.condensed[t]);
      }
      trial.lambda = next;
      try {
        const NewtonReport rep = newton_solve(model, trial, opt.newton);
        rec.newton_iterations += rep.iterations;
        rec.residual = rep.final_residual;
        if (opt.update_lagged) model.update_lagged(trial);
        prev = std::move(s);
        have_prev = true;
        s = std::move(trial);
        reached = next;
      } catch (const NonConvergence&) {
        if (++depth > opt.max_bisections)
          throw NonConvergence("load step to lambda = " + std::to_string(target) + " failed after bisection");
        inc *= 0.5;
        ++rec.bisections;
        have_prev = false;
      }
    }
    s.lambda = target;
    records.push_back(rec);
    if (callback) callback(rec, s);
  }
  return records;
}

}  // namespace shell
