#include "shell/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "shell/error.hpp"

namespace shell {

namespace {

using Params = std::map<std::string, double>;

double param(const Params& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw ConfigError("missing case parameter '" + key + "'");
  return it->second;
}

// Displacement component of a probe vertex, optionally projected on a unit direction.
Column displacement(const std::string& name, const std::string& probe, const Vec3d& dir) {
  return {name, [probe, dir](const Model& m, const State& s) {
            return dot(m.vertex_displacement(s, m.probe_vertex(probe)), dir);
          }};
}

Column stress_xx(const std::string& name, const std::string& probe) {
  return {name, [probe](const Model& m, const State& s) {
            // With the projection active the auxiliary field is the consistent stress.
            return m.membrane_stress_at_point(s, m.mesh().probes.at(probe), m.locking())(0, 0);
          }};
}

Column moment_norm(const std::string& name, const std::string& tag) {
  return {name, [tag](const Model& m, const State& s) { return m.max_moment_norm(s, tag); }};
}

BoundaryCondition bc(const std::string& tag, BcType type, Vec3d value = {0, 0, 0}, double moment = 0) {
  BoundaryCondition b;
  b.tag = tag;
  b.type = type;
  b.value = value;
  b.moment = moment;
  return b;
}

ReferenceCheck ref(const std::string& column, double lambda, double value, double tol, SourceKind src,
                   const std::string& note, const std::string& grid, Params params = {}, int order = 1) {
  ReferenceCheck r;
  r.column = column;
  r.lambda = lambda;
  r.value = value;
  r.tol = tol;
  r.source = src;
  r.note = note;
  r.grid = grid;
  r.params = std::move(params);
  r.order = order;
  return r;
}

const Vec3d ex{1, 0, 0}, ey{0, 1, 0}, ez{0, 0, 1};

BenchmarkCase cant_shear() {
  BenchmarkCase c;
  c.name = "cant_shear";
  c.description = "cantilever strip, clamped at x = 0, transverse shear on the free end";
  c.default_grid = "16x1";
  c.default_params = {{"P", 4.0}};
  c.build = [](const GenParams& g, const Params& p) {
    CaseSetup s;
    s.mesh = gen_benchmark("cant_shear", g);
    s.material = {1.2e6, 0.0, 0.1};
    s.problem.bcs = {bc("clamped", BcType::Clamped)};
    // P is the total end force; the strip has unit width.
    s.problem.loads.edge = {{"load", {0, 0, param(p, "P")}}};
    s.columns = {displacement("A_U", "A", ex), displacement("A_W", "A", ez)};
    return s;
  };
  const std::string n = "end shear, p1 16x1";
  c.references = {ref("A_U", 0.5, -1.608, 0.02, SourceKind::Published, n, "16x1"),
                  ref("A_W", 0.5, 4.940, 0.02, SourceKind::Published, n, "16x1"),
                  ref("A_U", 1.0, -3.292, 0.02, SourceKind::Published, n, "16x1"),
                  ref("A_W", 1.0, 6.708, 0.02, SourceKind::Published, n, "16x1")};
  return c;
}

BenchmarkCase cant_moment() {
  BenchmarkCase c;
  c.name = "cant_moment";
  c.description = "cantilever strip rolled up into a full circle by an end moment";
  c.default_grid = "16x1";
  // M = 2 pi EI / L rolls the strip of length 12 into one circle.
  c.default_params = {{"M", 50.0 * M_PI / 3.0}};
  c.build = [](const GenParams& g, const Params& p) {
    CaseSetup s;
    s.mesh = gen_benchmark("cant_moment", g);
    s.material = {1.2e6, 0.0, 0.1};
    s.problem.bcs = {bc("clamped", BcType::Clamped), bc("load", BcType::PrescribedMoment, {0, 0, 0}, param(p, "M")),
                     bc("side", BcType::Symmetry, ey)};
    s.columns = {displacement("A_U", "A", ex), displacement("A_W", "A", ez)};
    return s;
  };
  const std::string n = "end moment, p1 16x1";
  // Exact tip position for a circle of radius L / (2 pi lambda).
  auto exact_w = [](double lam) { return 12.0 / (2.0 * M_PI * lam) * (1.0 - std::cos(2.0 * M_PI * lam)); };
  c.references = {ref("A_W", 0.05, 1.870, 0.005, SourceKind::Published, n, "16x1"),
                  ref("A_U", 0.5, -12.000, 0.05, SourceKind::Published, n, "16x1"),
                  ref("A_W", 0.5, 7.652, 0.05, SourceKind::Published, n, "16x1"),
                  ref("A_W", 0.5, exact_w(0.5), 0.05, SourceKind::Analytic, "circle radius 6/pi", "16x1"),
                  ref("A_U", 1.0, -12.000, 0.05, SourceKind::Analytic, "full roll-up", "16x1"),
                  ref("A_W", 1.0, 0.000, 0.05, SourceKind::Analytic, "full roll-up", "16x1")};
  return c;
}

BenchmarkCase slit_annulus() {
  BenchmarkCase c;
  c.name = "slit_annulus";
  c.description = "slit annular plate, one lip clamped, the other lifted by a line force";
  c.default_grid = "10x80";
  c.default_params = {{"P", 4.034}};
  c.build = [](const GenParams& g, const Params& p) {
    CaseSetup s;
    s.mesh = gen_benchmark("slit_annulus", g);
    s.material = {2.1e8, 0.0, 0.03};
    s.problem.bcs = {bc("clamped", BcType::Clamped)};
    // P is the line force per unit length along the loaded lip.
    s.problem.loads.edge = {{"load", {0, 0, param(p, "P")}}};
    s.columns = {displacement("A_W", "A", ez), displacement("B_W", "B", ez)};
    return s;
  };
  c.references = {ref("B_W", 1.0, 13.8224, 0.1, SourceKind::Published, "slit annulus, p1 10x80", "10x80")};
  return c;
}

BenchmarkCase hemisphere() {
  BenchmarkCase c;
  c.name = "hemisphere";
  c.description = "quarter hemisphere with alternating radial point forces on the equator";
  c.default_grid = "h=0.5";
  c.default_params = {{"P", 1.0}};
  c.build = [](const GenParams& g, const Params& p) {
    CaseSetup s;
    s.mesh = gen_benchmark("hemisphere", g);
    s.material = {6.825e7, 0.3, 0.04};
    s.problem.bcs = {bc("sym_x", BcType::Symmetry, ex), bc("sym_y", BcType::Symmetry, ey)};
    // The loads are self-equilibrated; fixing the pole height removes the
    // remaining rigid translation.
    s.problem.point_constraints = {{"C", {false, false, true}}};
    const double P = param(p, "P");
    s.problem.loads.point = {{"A", P * ex}, {"B", -P * ey}};
    s.columns = {displacement("A_UR", "A", ex), displacement("B_UR", "B", -1.0 * ey)};
    return s;
  };
  c.references = {
      ref("B_UR", 1.0, 0.092, 0.002, SourceKind::Published, "hemisphere P=1, p1 h=0.5", "h=0.5", {{"P", 1.0}}),
      ref("B_UR", 1.0, 3.8560, 0.05, SourceKind::Published, "hemisphere P=400, p1 h=0.5", "h=0.5",
          {{"P", 400.0}})};
  return c;
}

BenchmarkCase twisted_beam() {
  BenchmarkCase c;
  c.name = "twisted_beam";
  c.description = "beam pre-twisted by 90 degrees, clamped root, tip force in x or z";
  c.default_grid = "4x24";
  c.default_params = {{"t", 0.32}, {"Px", 0.0}, {"Pz", 1.0}};
  // The published p1 values were computed with the membrane projection.
  c.locking_order1 = true;
  c.build = [](const GenParams& g, const Params& p) {
    CaseSetup s;
    s.mesh = gen_benchmark("twisted_beam", g);
    s.material = {29e6, 0.22, param(p, "t")};
    s.problem.bcs = {bc("clamped", BcType::Clamped)};
    // Total tip force spread uniformly over the tip edge of width 1.1.
    const double b = 1.1;
    s.problem.loads.edge = {{"tip", {param(p, "Px") / b, 0, param(p, "Pz") / b}}};
    s.columns = {displacement("A_U", "A", ex), displacement("A_W", "A", ez)};
    return s;
  };
  const std::string n = "twisted beam, p1 4x24";
  c.references = {
      ref("A_U", 1.0, 5.470e-3, 1e-5, SourceKind::Published, n, "4x24", {{"t", 0.0032}, {"Px", 1e-6}, {"Pz", 0.0}}),
      ref("A_U", 1.0, 4.538, 0.01, SourceKind::Published, n, "4x24", {{"t", 0.0032}, {"Px", 1e-3}, {"Pz", 0.0}}),
      ref("A_W", 1.0, 1.822e-3, 1e-5, SourceKind::Published, n, "4x24", {{"t", 0.32}, {"Px", 0.0}, {"Pz", 1.0}})};
  return c;
}

BenchmarkCase zsection() {
  BenchmarkCase c;
  c.name = "zsection";
  c.description = "Z-section cantilever under an end torque carried by flange shears";
  c.default_grid = "32x15";
  c.default_params = {{"M", 1.2e6}};
  c.build = [](const GenParams& g, const Params& p) {
    CaseSetup s;
    s.mesh = gen_benchmark("zsection", g);
    s.material = {2.1e11, 0.3, 0.1};
    s.problem.bcs = {bc("clamped", BcType::Clamped)};
    // Two opposite flange shears P = M / W, each spread over a flange of width 1;
    // the top flange is pushed along +y.
    const double P = param(p, "M") / 2.0;
    s.problem.loads.edge = {{"load_top", {0, P, 0}}, {"load_bottom", {0, -P, 0}}};
    s.columns = {stress_xx("A_SXX", "A")};
    return s;
  };
  c.references = {ref("A_SXX", 1.0, -1.0777e8, 1e6, SourceKind::Published, "Z-section, p1 32x15", "32x15")};
  return c;
}

BenchmarkCase tsection() {
  BenchmarkCase c;
  c.name = "tsection";
  c.description = "T-section with a branch edge, clamped web, shear on the left flange";
  c.default_grid = "4x1";
  c.default_params = {{"P", 1000.0}};
  c.build = [](const GenParams& g, const Params& p) {
    CaseSetup s;
    s.mesh = gen_benchmark("tsection", g);
    s.material = {6e6, 0.0, 0.1};
    s.problem.bcs = {bc("clamped", BcType::Clamped)};
    // Unit width, so the per-length force equals the total force.
    s.problem.loads.edge = {{"load", {0, 0, -param(p, "P")}}};
    Column left = moment_norm("left_MOMENT", "left");
    Column right = moment_norm("right_MOMENT", "right");
    Column ratio{"right_RATIO", [](const Model& m, const State& st) {
                   const double l = m.max_moment_norm(st, "left");
                   return l > 0.0 ? m.max_moment_norm(st, "right") / l : 0.0;
                 }};
    s.columns = {displacement("A_U", "A", ex), displacement("A_W", "A", ez), left, right, ratio};
    return s;
  };
  ReferenceCheck r = ref("right_RATIO", 1.0, 1e-6, 0.0, SourceKind::Derived, "unloaded branch only rotates", "4x1");
  r.kind = CheckKind::AtMost;
  c.references = {r};
  return c;
}

std::string format_grid(const GenParams& g) {
  if (g.h > 0.0) {
    std::ostringstream os;
    os << "h=" << g.h;
    return os.str();
  }
  return std::to_string(g.nx) + "x" + std::to_string(g.ny);
}

}  // namespace

const std::vector<BenchmarkCase>& benchmark_cases() {
  static const std::vector<BenchmarkCase> cases = {cant_shear(),   cant_moment(), slit_annulus(), hemisphere(),
                                                   twisted_beam(), zsection(),    tsection()};
  return cases;
}

const BenchmarkCase& find_case(const std::string& name) {
  for (const BenchmarkCase& c : benchmark_cases())
    if (c.name == name) return c;
  throw ConfigError("unknown benchmark case '" + name + "'");
}

GenParams parse_grid(const std::string& grid) {
  GenParams g;
  try {
    if (grid.rfind("h=", 0) == 0) {
      std::size_t used = 0;
      g.h = std::stod(grid.substr(2), &used);
      if (used != grid.size() - 2 || !(g.h > 0.0)) throw ConfigError("");
      return g;
    }
    const std::size_t x = grid.find('x');
    if (x == std::string::npos) throw ConfigError("");
    std::size_t u1 = 0, u2 = 0;
    g.nx = std::stoi(grid.substr(0, x), &u1);
    g.ny = std::stoi(grid.substr(x + 1), &u2);
    if (u1 != x || u2 != grid.size() - x - 1 || g.nx < 1 || g.ny < 1) throw ConfigError("");
  } catch (const std::exception&) {
    throw ConfigError("malformed grid '" + grid + "': expected AxB or h=<v>");
  }
  return g;
}

int RunReport::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  throw ConfigError("report of case '" + case_name + "' has no column '" + name + "'");
}

RunReport run_case(const std::string& name, const RunOverrides& o) { return run_case(find_case(name), o); }

RunReport run_case(const BenchmarkCase& bench, const RunOverrides& o) {
  RunReport rep;
  rep.case_name = bench.name;
  rep.order = o.order.value_or(1);
  rep.steps = o.steps.value_or(bench.default_steps);
  rep.angle = o.angle.value_or(AngleMode::Exact);
  rep.params = bench.default_params;
  for (const auto& [k, v] : o.params) {
    if (!rep.params.count(k)) throw ConfigError("case '" + bench.name + "' has no parameter '" + k + "'");
    rep.params[k] = v;
  }
  const GenParams g = parse_grid(o.grid.value_or(bench.default_grid));
  rep.grid = format_grid(g);

  CaseSetup setup = bench.build(g, rep.params);
  ModelOptions mo;
  mo.order = rep.order;
  mo.locking = o.locking;
  if (!mo.locking && rep.order == 1 && bench.locking_order1) mo.locking = bench.locking_order1;
  mo.angle = rep.angle;
  const Model model(std::move(setup.mesh), setup.material, std::move(setup.problem), mo);
  rep.locking = model.locking();
  for (const Column& c : setup.columns) rep.columns.push_back(c.name);

  LoadStepOptions lo;
  lo.steps = rep.steps;
  lo.newton.verbose = o.verbose;
  State s = model.initial_state();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    run_load_steps(model, s, lo, [&](const StepRecord& r, const State& st) {
      RunRow row;
      row.step = r.step;
      row.lambda = r.lambda;
      row.newton_iterations = r.newton_iterations;
      row.bisections = r.bisections;
      row.energy = model.lagrangian(st);
      for (const Column& c : setup.columns) row.values.push_back(c.eval(model, st));
      rep.rows.push_back(std::move(row));
      if (o.verbose)
        std::fprintf(stderr, "step %d lambda=%.4f newton=%d bisections=%d\n", r.step, r.lambda, r.newton_iterations,
                     r.bisections);
    });
  } catch (const SolverError& e) {
    rep.failed = true;
    rep.diagnostics = e.what();
  } catch (const DegenerateDeformation& e) {
    rep.failed = true;
    rep.diagnostics = std::string(e.what()) + " (element " + std::to_string(e.element()) + ")";
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

ComparisonSummary compare_reference(const RunReport& report, const BenchmarkCase& bench) {
  ComparisonSummary sum;
  sum.pass = !report.failed;
  for (const ReferenceCheck& r : bench.references) {
    if (r.order != report.order || r.grid != report.grid) continue;
    bool applies = true;
    for (const auto& [k, v] : r.params) {
      auto it = report.params.find(k);
      if (it == report.params.end() || std::abs(it->second - v) > 1e-12 * std::max(1.0, std::abs(v))) applies = false;
    }
    if (!applies) continue;
    const int col = report.column_index(r.column);
    CheckResult c;
    std::ostringstream label;
    label << r.column << "@" << r.lambda;
    c.label = label.str();
    c.expected = r.value;
    const RunRow* row = nullptr;
    for (const RunRow& rr : report.rows)
      if (std::abs(rr.lambda - r.lambda) <= 1e-9) row = &rr;
    if (!row) {
      c.status = CheckStatus::Skipped;
      c.message = "warning: no row at this load factor";
      sum.checks.push_back(c);
      continue;
    }
    c.actual = row->values[col];
    c.margin = r.kind == CheckKind::Within ? r.tol - std::abs(c.actual - r.value) : r.value - c.actual;
    c.status = c.margin >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    c.message = r.note;
    if (c.status == CheckStatus::Fail) sum.pass = false;
    sum.checks.push_back(c);
  }
  return sum;
}

std::string format_curve(const RunReport& report) {
  std::string out = "step,lambda";
  for (const std::string& c : report.columns) out += "," + c;
  out += ",newton_iters\n";
  char buf[64];
  for (const RunRow& r : report.rows) {
    out += std::to_string(r.step);
    std::snprintf(buf, sizeof buf, ",%.9e", r.lambda);
    out += buf;
    for (double v : r.values) {
      std::snprintf(buf, sizeof buf, ",%.9e", v == 0.0 ? 0.0 : v);
      out += buf;
    }
    out += "," + std::to_string(r.newton_iterations) + "\n";
  }
  return out;
}

void emit_curve(const RunReport& report, const std::string& path) {
  if (report.rows.empty()) throw ConfigError("cannot write an empty load curve");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << format_curve(report);
  if (!f.flush()) throw Error("failed writing '" + path + "'");
}

}  // namespace shell
