#include <gtest/gtest.h>

#include <cmath>

#include "shell/generators.hpp"
#include "shell/model.hpp"
#include "shell/plate.hpp"
#include "shell/solver.hpp"

using namespace shell;

namespace {

const std::vector<std::string> kAllSides = {"left", "right", "bottom", "top"};

// Classical series value for the centre deflection of a clamped unit square
// under a uniform load, in units of f a^4 / D.
constexpr double kClampedSquareCentre = 0.00126532;

SurfaceMesh square(int n, bool triangles = false) {
  GenParams gp;
  gp.nx = n;
  gp.triangles = triangles;
  return gen_benchmark("flat_plate", gp);
}

// E = 12, t = 1, nu = 0 gives unit bending stiffness.
const Material kUnitPlate{12.0, 0.0, 1.0};

}  // namespace

TEST(HhjPlate, UnloadedClampedPlateStaysFlat) {
  const SurfaceMesh mesh = square(4);
  const PlateSolution sol = solve_hhj_plate(mesh, 2, kUnitPlate, 0.0, kAllSides);
  EXPECT_EQ(sol.x.cwiseAbs().maxCoeff(), 0.0);
}

TEST(HhjPlate, SolutionIsAStationaryPoint) {
  const SurfaceMesh mesh = square(4);
  const PlateSolution sol = solve_hhj_plate(mesh, 2, kUnitPlate, 1.0, kAllSides);
  const Eigen::VectorXd g = sol.system.H * sol.x + sol.system.b;
  // Rows of the clamped DOFs carry reactions; everything else is balanced.
  int balanced = 0;
  for (int i = 0; i < g.size(); ++i)
    if (sol.x[i] != 0.0) {
      EXPECT_LE(std::abs(g[i]), 1e-12) << "row " << i;
      ++balanced;
    }
  EXPECT_GT(balanced, 0);
}

TEST(HhjPlate, UpwardLoadDeflectsUpward) {
  const SurfaceMesh mesh = square(4);
  const PlateSolution sol = solve_hhj_plate(mesh, 1, kUnitPlate, 1.0, kAllSides);
  EXPECT_GT(plate_deflection_at(mesh, sol, mesh.probes.at("C")), 0.0);
}

TEST(HhjPlate, ClampedSquareCentreDeflection) {
  const SurfaceMesh coarse = square(8);
  const PlateSolution p3 = solve_hhj_plate(coarse, 3, kUnitPlate, 1.0, kAllSides);
  const double w3 = plate_deflection_at(coarse, p3, coarse.probes.at("C"));
  EXPECT_NEAR(w3, kClampedSquareCentre, 1e-4 * kClampedSquareCentre);

  const SurfaceMesh fine = square(32);
  const PlateSolution p1 = solve_hhj_plate(fine, 1, kUnitPlate, 1.0, kAllSides);
  const double w1 = plate_deflection_at(fine, p1, fine.probes.at("C"));
  EXPECT_LE(std::abs(w1 - w3) / std::abs(w3), 1e-2);
}

TEST(HhjPlate, TrianglesAndQuadsConvergeToTheSameDeflection) {
  const SurfaceMesh tri = square(8, true);
  const PlateSolution sol = solve_hhj_plate(tri, 3, kUnitPlate, 1.0, kAllSides);
  EXPECT_NEAR(plate_deflection_at(tri, sol, tri.probes.at("C")), kClampedSquareCentre, 1e-3 * kClampedSquareCentre);
}

TEST(HhjPlate, ShellModelReproducesThePlateInTheLinearRegime) {
  const double f = 1e-7;
  for (int k : {1, 2}) {
    const SurfaceMesh mesh = square(4);
    const PlateSolution plate = solve_hhj_plate(mesh, k, kUnitPlate, f, kAllSides);
    ProblemSpec spec;
    for (const std::string& tag : kAllSides) spec.bcs.push_back({tag, BcType::Clamped});
    spec.loads.area = {{{0.0, 0.0, f}, ""}};
    const Model model(mesh, kUnitPlate, spec, ModelOptions{k, false});
    State s = model.initial_state();
    s.lambda = 1.0;
    newton_solve(model, s);
    const double w_shell = model.vertex_displacement(s, model.probe_vertex("C"))[2];
    const double w_plate = plate_deflection_at(mesh, plate, mesh.probes.at("C"));
    EXPECT_NEAR(w_shell, w_plate, 1e-6 * std::abs(w_plate)) << "p" << k;
  }
}

TEST(HhjPlate, RejectsCurvedMeshes) {
  GenParams gp;
  gp.nx = 2;
  gp.ny = 2;
  EXPECT_THROW(assemble_hhj_plate(gen_benchmark("twisted_beam", gp), 1, kUnitPlate, 1.0), ConfigError);
}

TEST(HhjPlate, LagrangianChecksTheStateLength) {
  const PlateSystem sys = assemble_hhj_plate(square(2), 1, kUnitPlate, 1.0);
  EXPECT_THROW(hhj_plate_lagrangian(sys, Eigen::VectorXd::Zero(3)), ConfigError);
  EXPECT_EQ(hhj_plate_lagrangian(sys, Eigen::VectorXd::Zero(sys.size())), 0.0);
}
