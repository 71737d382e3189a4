// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. The first argument is the unit-test binary, which carries
// the property checks of criterion 8.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "shell/bench.hpp"

using namespace shell;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

void note(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [fail]");
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Runs a case and folds its applicable reference checks into the outcome.
RunReport checked_run(Outcome& o, const std::string& name, const RunOverrides& ov = {}) {
  const RunReport r = run_case(name, ov);
  o.seconds += r.seconds;
  if (r.failed) note(o, false, name + " run failed: " + r.diagnostics);
  const ComparisonSummary s = compare_reference(r, find_case(name));
  int applied = 0;
  for (const CheckResult& c : s.checks) {
    if (c.status == CheckStatus::Skipped) {
      note(o, false, c.label + " skipped (" + c.message + ")");
      continue;
    }
    ++applied;
    note(o, c.status == CheckStatus::Pass,
         c.label + fmt(" = %.6g (ref %.6g, margin %.3g)", c.actual, c.expected, c.margin));
  }
  if (applied == 0) note(o, false, name + ": no reference check applied");
  return r;
}

void time_limit(Outcome& o, double limit) {
  note(o, o.seconds < limit, fmt("runtime %.1f s < %.0f s", o.seconds, limit));
}

double value_at(const RunReport& r, const std::string& column, double lambda) {
  for (const RunRow& row : r.rows)
    if (std::abs(row.lambda - lambda) <= 1e-9) return row.values[r.column_index(column)];
  return std::nan("");
}

Outcome end_moment() {
  Outcome o;
  checked_run(o, "cant_moment");
  time_limit(o, 30.0);
  return o;
}

Outcome end_shear() {
  Outcome o;
  checked_run(o, "cant_shear");
  time_limit(o, 30.0);
  return o;
}

Outcome slit_annulus() {
  Outcome o;
  checked_run(o, "slit_annulus");
  time_limit(o, 600.0);
  return o;
}

Outcome hemisphere() {
  Outcome o;
  checked_run(o, "hemisphere");
  time_limit(o, 300.0);
  return o;
}

[[maybe_unused]] Outcome hemisphere_large_load() {
  Outcome o;
  RunOverrides ov;
  ov.params["P"] = 400.0;
  checked_run(o, "hemisphere", ov);
  return o;
}

Outcome twisted_beam() {
  Outcome o;
  struct Load {
    double t, Px, Pz;
  };
  for (const Load& l : {Load{0.0032, 1e-6, 0.0}, Load{0.0032, 1e-3, 0.0}, Load{0.32, 0.0, 1.0}}) {
    Outcome one;
    RunOverrides ov;
    ov.params = {{"t", l.t}, {"Px", l.Px}, {"Pz", l.Pz}};
    checked_run(one, "twisted_beam", ov);
    time_limit(one, 120.0);
    note(o, one.pass, fmt("t=%g Px=%g Pz=%g: ", l.t, l.Px, l.Pz) + one.detail);
    o.seconds += one.seconds;
  }
  return o;
}

Outcome zsection() {
  Outcome o;
  checked_run(o, "zsection");
  time_limit(o, 120.0);
  return o;
}

Outcome tsection() {
  Outcome o;
  const RunReport r = checked_run(o, "tsection");
  note(o, !r.failed && !r.rows.empty() && r.rows.back().lambda == 1.0, "converged to the full load");
  const int a = r.column_index("A_W");
  bool monotone = r.rows.size() > 1;
  for (std::size_t i = 1; i < r.rows.size(); ++i)
    if (!(r.rows[i].values[a] < r.rows[i - 1].values[a])) monotone = false;
  note(o, monotone, "A_W strictly monotone over " + std::to_string(r.rows.size()) + " rows");
  return o;
}

Outcome properties(const char* unit_tests) {
  Outcome o;
  if (!unit_tests) {
    note(o, false, "unit-test binary not given");
    return o;
  }
  const std::string filter =
      "ElementKernel.*:Condensation.*:Cofactor.CrossProductIdentity:PlateLimit.*:"
      "Lagrangian.InvariantUnderRigidMotion:Angles.SimplifiedAngleHasCubicRemainder";
  const std::string cmd = std::string("\"") + unit_tests + "\" --gtest_brief=1 --gtest_filter=" + filter;
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.c_str());
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  note(o, rc == 0, "property tests " + filter);
  return o;
}

Outcome locking_demo() {
  Outcome o;
  // At lambda = 0.5 the strip of length 12 is a half circle of radius 6/pi,
  // so the tip sits one diameter above the clamp.
  const double exact = 24.0 / M_PI;
  double err[2] = {0, 0};
  for (int i = 0; i < 2; ++i) {
    RunOverrides ov;
    ov.order = 3;
    ov.grid = "4x1";
    ov.locking = i == 0;
    const RunReport r = run_case("cant_moment", ov);
    o.seconds += r.seconds;
    const double w = value_at(r, "A_W", 0.5);
    err[i] = std::abs(w - exact);
    note(o, !r.failed && std::isfinite(w),
         std::string(i == 0 ? "with" : "without") + fmt(" projection W = %.5f, error %.3g", w, err[i]));
  }
  note(o, err[1] >= 10.0 * err[0], fmt("error ratio %.3g >= 10", err[1] / err[0]));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  const char* unit_tests = argc > 1 ? argv[1] : nullptr;
  std::vector<Criterion> all = {
      {1, "end-moment roll-up", end_moment},
      {2, "end shear", end_shear},
      {3, "slit annular plate", slit_annulus},
      {4, "hemisphere, P = 1", hemisphere},
      {5, "twisted beam", twisted_beam},
      {6, "Z-section membrane stress", zsection},
      {7, "T-section branch edge", tsection},
      {8, "property suite", [unit_tests] { return properties(unit_tests); }},
      {9, "locking demonstration", locking_demo},
  };
#ifdef SHELL_SLOW_TESTS
  all.insert(all.begin() + 4, Criterion{4, "hemisphere, P = 400 (slow)", hemisphere_large_load});
#endif
  int failed = 0;
  for (const Criterion& c : all) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s (%.1f s) %s\n", c.id, c.name.c_str(), o.pass ? "PASS" : "FAIL", o.seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, all.size());
  return failed == 0 ? 0 : 1;
}
