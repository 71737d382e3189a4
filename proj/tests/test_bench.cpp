#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "shell/bench.hpp"
#include "shell/error.hpp"

using namespace shell;

namespace {

RunReport synthetic_report() {
  RunReport r;
  r.case_name = "synthetic";
  r.order = 1;
  r.grid = "4x1";
  r.params = {{"P", 1.0}};
  r.columns = {"A_W"};
  for (int i = 0; i <= 2; ++i) {
    RunRow row;
    row.step = i;
    row.lambda = 0.5 * i;
    row.values = {2.0 * i};
    r.rows.push_back(row);
  }
  return r;
}

BenchmarkCase synthetic_case(double value, double tol, double lambda = 1.0) {
  BenchmarkCase c;
  c.name = "synthetic";
  ReferenceCheck r;
  r.column = "A_W";
  r.lambda = lambda;
  r.value = value;
  r.tol = tol;
  r.grid = "4x1";
  c.references = {r};
  return c;
}

}  // namespace

TEST(Grid, ParsesBothForms) {
  const GenParams g = parse_grid("4x24");
  EXPECT_EQ(g.nx, 4);
  EXPECT_EQ(g.ny, 24);
  EXPECT_DOUBLE_EQ(parse_grid("h=0.25").h, 0.25);
}

TEST(Grid, RejectsMalformedInput) {
  for (const char* bad : {"", "4", "4x", "x4", "4x0", "-1x3", "4x3x2", "4y3", "h=", "h=-1", "h=0.5q", "ax3"})
    EXPECT_THROW(parse_grid(bad), ConfigError) << "'" << bad << "'";
}

TEST(Compare, PassFailAndSkip) {
  const RunReport r = synthetic_report();
  const ComparisonSummary ok = compare_reference(r, synthetic_case(4.01, 0.02));
  ASSERT_EQ(ok.checks.size(), 1u);
  EXPECT_EQ(ok.checks[0].status, CheckStatus::Pass);
  EXPECT_NEAR(ok.checks[0].margin, 0.01, 1e-12);
  EXPECT_TRUE(ok.pass);

  // Off by twice the tolerance.
  const ComparisonSummary bad = compare_reference(r, synthetic_case(4.04, 0.02));
  EXPECT_EQ(bad.checks[0].status, CheckStatus::Fail);
  EXPECT_LT(bad.checks[0].margin, 0.0);
  EXPECT_FALSE(bad.pass);

  const ComparisonSummary skip = compare_reference(r, synthetic_case(1.0, 0.1, 0.3));
  EXPECT_EQ(skip.checks[0].status, CheckStatus::Skipped);
  EXPECT_NE(skip.checks[0].message.find("warning"), std::string::npos);
  EXPECT_TRUE(skip.pass);
}

TEST(Compare, IgnoresChecksForOtherRuns) {
  const RunReport r = synthetic_report();
  BenchmarkCase c = synthetic_case(4.0, 0.01);
  c.references[0].grid = "8x1";
  EXPECT_TRUE(compare_reference(r, c).checks.empty());
  c = synthetic_case(4.0, 0.01);
  c.references[0].order = 2;
  EXPECT_TRUE(compare_reference(r, c).checks.empty());
  c = synthetic_case(100.0, 0.01);
  c.references[0].params = {{"P", 2.0}};
  EXPECT_TRUE(compare_reference(r, c).pass);
}

TEST(Compare, AtMostChecksAndFailedRuns) {
  RunReport r = synthetic_report();
  BenchmarkCase c = synthetic_case(4.5, 0.0);
  c.references[0].kind = CheckKind::AtMost;
  EXPECT_TRUE(compare_reference(r, c).pass);
  c.references[0].value = 3.5;
  EXPECT_FALSE(compare_reference(r, c).pass);
  r.failed = true;
  EXPECT_FALSE(compare_reference(r, synthetic_case(4.0, 1.0)).pass);
}

TEST(Compare, MissingColumnIsAConfigError) {
  BenchmarkCase c = synthetic_case(4.0, 0.1);
  c.references[0].column = "B_W";
  EXPECT_THROW(compare_reference(synthetic_report(), c), ConfigError);
}

TEST(Curve, CsvLayout) {
  const std::string csv = format_curve(synthetic_report());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,lambda,A_W,newton_iters");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0.000000000e+00,0.000000000e+00,0");
  std::getline(in, line);
  EXPECT_EQ(line, "1,5.000000000e-01,2.000000000e+00,0");
}

TEST(Curve, EmitWritesTheSameBytes) {
  const RunReport r = synthetic_report();
  const std::string path = ::testing::TempDir() + "curve.csv";
  emit_curve(r, path);
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), format_curve(r));
  std::remove(path.c_str());
  EXPECT_THROW(emit_curve(RunReport{}, path), ConfigError);
}

TEST(Cases, RegistryAndParameterChecks) {
  for (const char* name : {"cant_shear", "cant_moment", "slit_annulus", "hemisphere", "twisted_beam", "zsection",
                           "tsection"})
    EXPECT_EQ(find_case(name).name, name);
  EXPECT_THROW(find_case("no_such_case"), ConfigError);
  RunOverrides o;
  o.params["Q"] = 1.0;
  EXPECT_THROW(run_case("cant_shear", o), ConfigError);
  o.params.clear();
  o.grid = "16y1";
  EXPECT_THROW(run_case("cant_shear", o), ConfigError);
}

TEST(Cases, EndShearMatchesPublishedHalfLoad) {
  const RunReport r = run_case("cant_shear");
  ASSERT_FALSE(r.failed) << r.diagnostics;
  const ComparisonSummary s = compare_reference(r, find_case("cant_shear"));
  int at_half = 0;
  for (const CheckResult& c : s.checks) {
    EXPECT_EQ(c.status, CheckStatus::Pass) << c.label << " got " << c.actual << " expected " << c.expected;
    if (c.label.find("@0.5") != std::string::npos) ++at_half;
  }
  EXPECT_EQ(at_half, 2);
}

TEST(Cases, RunsAreDeterministic) {
  RunOverrides o;
  o.steps = 3;
  const RunReport a = run_case("cant_moment", o), b = run_case("cant_moment", o);
  EXPECT_EQ(format_curve(a), format_curve(b));
  EXPECT_EQ(a.rows.size(), 4u);
}

TEST(Cases, EndMomentCurveHasOneRowPerStep) {
  const RunReport r = run_case("cant_moment");
  ASSERT_FALSE(r.failed) << r.diagnostics;
  ASSERT_EQ(r.rows.size(), 21u);
  EXPECT_EQ(r.rows.front().lambda, 0.0);
  EXPECT_EQ(r.rows.back().lambda, 1.0);
  EXPECT_NEAR(r.rows[1].values[r.column_index("A_W")], 1.870, 0.005);
  EXPECT_THROW(r.column_index("nope"), ConfigError);
}
