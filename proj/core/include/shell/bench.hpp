#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shell/generators.hpp"
#include "shell/model.hpp"
#include "shell/solver.hpp"

namespace shell {

// A named scalar recorded at every load step, "<probe>_<component>".
struct Column {
  std::string name;
  std::function<double(const Model&, const State&)> eval;
};

enum class SourceKind { Published, Analytic, Derived };
enum class CheckKind { Within, AtMost };

// One reference value. It applies only to runs whose order, grid and case
// parameters match; other runs skip it silently.
struct ReferenceCheck {
  std::string column;
  double lambda = 1.0;
  double value = 0.0;
  double tol = 0.0;  // Within: |v - value| <= tol; AtMost: v <= value
  CheckKind kind = CheckKind::Within;
  SourceKind source = SourceKind::Published;
  std::string note;
  int order = 1;
  std::string grid;
  std::map<std::string, double> params;
};

struct CaseSetup {
  SurfaceMesh mesh;
  Material material;
  ProblemSpec problem;
  std::vector<Column> columns;
};

struct BenchmarkCase {
  std::string name;
  std::string description;
  std::string default_grid;  // "AxB" or "h=<v>"
  int default_steps = 20;
  std::map<std::string, double> default_params;
  // Locking setting at order 1 when the run does not choose one; unset keeps
  // the model default.
  std::optional<bool> locking_order1;
  std::function<CaseSetup(const GenParams&, const std::map<std::string, double>&)> build;
  std::vector<ReferenceCheck> references;
};

const std::vector<BenchmarkCase>& benchmark_cases();
const BenchmarkCase& find_case(const std::string& name);

// "AxB" -> nx, ny; "h=<v>" -> h. Throws ConfigError on malformed input.
GenParams parse_grid(const std::string& grid);

struct RunOverrides {
  std::optional<int> order;
  std::optional<std::string> grid;
  std::optional<int> steps;
  std::optional<AngleMode> angle;
  std::optional<bool> locking;
  std::map<std::string, double> params;  // must name parameters the case declares
  bool verbose = false;
};

struct RunRow {
  int step = 0;
  double lambda = 0.0;
  std::vector<double> values;  // one per column
  int newton_iterations = 0;
  int bisections = 0;
  EnergyBreakdown energy;
};

struct RunReport {
  std::string case_name;
  int order = 1;
  std::string grid;
  int steps = 0;
  bool locking = false;
  AngleMode angle = AngleMode::Exact;
  std::map<std::string, double> params;
  std::vector<std::string> columns;
  std::vector<RunRow> rows;  // strictly increasing lambda
  bool failed = false;
  std::string diagnostics;
  double seconds = 0.0;

  // Throws ConfigError if the column is absent.
  int column_index(const std::string& name) const;
};

RunReport run_case(const std::string& name, const RunOverrides& overrides = {});
RunReport run_case(const BenchmarkCase& bench, const RunOverrides& overrides = {});

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckResult {
  std::string label;  // column@lambda
  CheckStatus status = CheckStatus::Skipped;
  double expected = 0.0;
  double actual = 0.0;
  double margin = 0.0;  // tolerance left over; negative on failure
  std::string message;
};

struct ComparisonSummary {
  std::vector<CheckResult> checks;
  bool pass = true;  // no failed check and the run itself completed
};

// Evaluates the applicable reference checks. A missing lambda row skips the
// check with a warning; a missing column throws ConfigError.
ComparisonSummary compare_reference(const RunReport& report, const BenchmarkCase& bench);

// CSV: step,lambda,<columns>,newton_iters with 10 significant digits.
std::string format_curve(const RunReport& report);
void emit_curve(const RunReport& report, const std::string& path);

}  // namespace shell
