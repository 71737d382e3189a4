// shellbench: runs the registered shell benchmarks and checks them against
// their reference values. Exit status 0 means every applicable check passed.
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shell/bench.hpp"
#include "shell/error.hpp"

namespace {

struct Flags {
  std::string case_name;
  int order = 1;
  std::string grid;
  int steps = 0;
  std::string angle = "exact";
  std::string locking;  // empty: case default
  std::string out;
  std::vector<std::string> params;
  bool verbose = false;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  const auto names = [] {
    std::vector<std::string> v;
    for (const auto& c : shell::benchmark_cases()) v.push_back(c.name);
    return v;
  }();
  cmd->add_option("--case", f.case_name, "benchmark case")->required()->check(CLI::IsMember(names));
  cmd->add_option("--order", f.order, "polynomial order k")->check(CLI::Range(1, 4));
  cmd->add_option("--grid", f.grid, "AxB or h=<v> (default: case grid)");
  cmd->add_option("--steps", f.steps, "uniform load steps (default: case steps)")->check(CLI::PositiveNumber);
  cmd->add_option("--angle", f.angle, "exact or simplified dihedral angle")
      ->check(CLI::IsMember({"exact", "simplified"}));
  cmd->add_option("--locking", f.locking, "membrane locking augmentation (default: on for k >= 2, per case at k = 1)")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--param", f.params, "case parameter override key=value (repeatable)");
  cmd->add_flag("-v,--verbose", f.verbose, "print step and Newton progress on stderr");
}

shell::RunOverrides overrides(const Flags& f) {
  shell::RunOverrides o;
  o.order = f.order;
  if (!f.grid.empty()) o.grid = f.grid;
  if (f.steps > 0) o.steps = f.steps;
  o.angle = f.angle == "simplified" ? shell::AngleMode::Simplified : shell::AngleMode::Exact;
  if (!f.locking.empty()) o.locking = f.locking == "on";
  for (const std::string& kv : f.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw shell::ConfigError("--param expects key=value, got '" + kv + "'");
    try {
      o.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw shell::ConfigError("--param value is not a number: '" + kv + "'");
    }
  }
  o.verbose = f.verbose;
  return o;
}

const char* status_name(shell::CheckStatus s) {
  switch (s) {
    case shell::CheckStatus::Pass: return "PASS";
    case shell::CheckStatus::Fail: return "FAIL";
    default: return "SKIP";
  }
}

void print_summary(const shell::RunReport& r, const shell::ComparisonSummary& sum) {
  std::printf("case %s  order %d  grid %s  steps %d  locking %s  %.2f s\n", r.case_name.c_str(), r.order,
              r.grid.c_str(), r.steps, r.locking ? "on" : "off", r.seconds);
  if (r.failed) std::printf("run FAILED: %s\n", r.diagnostics.c_str());
  for (const auto& c : sum.checks) {
    if (c.status == shell::CheckStatus::Skipped)
      std::printf("  %s %-18s %s\n", status_name(c.status), c.label.c_str(), c.message.c_str());
    else
      std::printf("  %s %-18s expected %.6g  got %.6g  margin %.3g  (%s)\n", status_name(c.status), c.label.c_str(),
                  c.expected, c.actual, c.margin, c.message.c_str());
  }
  if (sum.checks.empty()) std::printf("  no reference values for this configuration\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Kirchhoff-Love shell benchmarks"};
  app.require_subcommand(1);
  Flags run_flags, verify_flags;

  CLI::App* run = app.add_subcommand("run", "run a case and write its load curve");
  add_run_flags(run, run_flags);
  run->add_option("--out", run_flags.out, "CSV output path (default: stdout)");

  CLI::App* verify = app.add_subcommand("verify", "run a case and compare with its reference values");
  add_run_flags(verify, verify_flags);
  verify->add_option("--out", verify_flags.out, "optional CSV output path");

  app.add_subcommand("list", "list the registered cases");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list")) {
      for (const auto& c : shell::benchmark_cases())
        std::printf("%-14s grid %-7s %s\n", c.name.c_str(), c.default_grid.c_str(), c.description.c_str());
      return 0;
    }
    const bool verifying = app.got_subcommand("verify");
    const Flags& f = verifying ? verify_flags : run_flags;
    const shell::BenchmarkCase& bench = shell::find_case(f.case_name);
    const shell::RunReport report = shell::run_case(bench, overrides(f));
    if (!f.out.empty() && !report.rows.empty()) shell::emit_curve(report, f.out);
    if (!verifying) {
      if (f.out.empty()) std::cout << shell::format_curve(report);
      if (report.failed) std::fprintf(stderr, "run failed: %s\n", report.diagnostics.c_str());
      return report.failed ? 1 : 0;
    }
    const shell::ComparisonSummary sum = shell::compare_reference(report, bench);
    print_summary(report, sum);
    return sum.pass ? 0 : 1;
  } catch (const shell::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
