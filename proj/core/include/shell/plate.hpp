#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "shell/energy.hpp"
#include "shell/mesh.hpp"
#include "shell/spaces.hpp"

namespace shell {

// Linear Hellan-Herrmann-Johnson plate in hybridized form on a flat mesh in
// the x-y plane with upward normals. The scalar deflection w uses the order-k
// Lagrange basis, the moment tensor and the edge rotation alpha order k-1:
//
//   L = -(6/t^3) |sigma|^2_{M^-1}
//       - sum_T ( int_T sigma : grad^2 w - int_dT (d_mu w - s alpha) sigma_mumu )
//       - int f w
//
// with mu the outward conormal and s the incidence sign of the edge. This is
// the second variation of the nonlinear shell Lagrangian at the flat zero
// state restricted to (w, alpha, sigma); the load enters as work done, so an
// upward f deflects the plate upward.

// Element matrix over [w (basis node order) | alpha (local edge * k + j) | sigma].
struct PlateElementSystem {
  Eigen::MatrixXd H;  // constant Hessian of L
  Eigen::VectorXd b;  // -int f phi on the w rows
  int n_w = 0, n_alpha = 0, n_sigma = 0;
};

PlateElementSystem hhj_plate_element(const SurfaceMesh& mesh, const Spaces& spaces, int element,
                                     const Material& material, double f);

// Global saddle-point system; the unknown vector is [w | alpha | sigma].
struct PlateSystem {
  Eigen::SparseMatrix<double> H;
  Eigen::VectorXd b;
  int n_w = 0, n_alpha = 0, n_sigma = 0;
  // Per element: global index of each local DOF in PlateElementSystem order.
  std::vector<std::vector<int>> element_index;
  int size() const { return n_w + n_alpha + n_sigma; }
};

// Throws ConfigError when the mesh is not flat in the x-y plane.
PlateSystem assemble_hhj_plate(const SurfaceMesh& mesh, int k, const Material& material, double f);

// The quadratic Lagrangian 1/2 x^T H x + b^T x.
double hhj_plate_lagrangian(const PlateSystem& system, const Eigen::VectorXd& x);

struct PlateSolution {
  PlateSystem system;
  Eigen::VectorXd x;
  Spaces spaces;
};

// Clamped tags fix w on their nodes and alpha on their edges; other
// boundaries are simply free.
PlateSolution solve_hhj_plate(const SurfaceMesh& mesh, int k, const Material& material, double f,
                              const std::vector<std::string>& clamped_tags);

// Deflection at a point of the mesh.
double plate_deflection_at(const SurfaceMesh& mesh, const PlateSolution& sol, const Vec3d& p);

}  // namespace shell
