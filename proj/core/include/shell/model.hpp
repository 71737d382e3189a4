#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "shell/energy.hpp"
#include "shell/kinematics.hpp"
#include "shell/mesh.hpp"
#include "shell/quadrature.hpp"
#include "shell/spaces.hpp"

namespace shell {

enum class BcType { Free, Clamped, Symmetry, PrescribedDisplacement, PrescribedMoment };

struct BoundaryCondition {
  std::string tag;
  BcType type = BcType::Free;
  Vec3d value{0.0, 0.0, 0.0};  // symmetry plane normal (axis aligned) or displacement at lambda = 1
  double moment = 0.0;         // moment per length at lambda = 1
};

struct EdgeTraction {
  std::string tag;
  Vec3d force_per_length;
};
struct PointLoad {
  std::string probe;
  Vec3d force;
};
struct AreaLoad {
  Vec3d force_per_area;
  std::string element_tag;  // empty: every element
};
struct PointConstraint {
  std::string probe;
  std::array<bool, 3> fixed{true, true, true};
};

// Dead loads; every entry is scaled by the load factor.
struct LoadProgram {
  std::vector<EdgeTraction> edge;
  std::vector<PointLoad> point;
  std::vector<AreaLoad> area;
};

struct ProblemSpec {
  std::vector<BoundaryCondition> bcs;
  LoadProgram loads;
  std::vector<PointConstraint> point_constraints;
};

struct ModelOptions {
  int order = 1;
  std::optional<bool> locking;  // default: on for order >= 2
  AngleMode angle = AngleMode::Exact;
  int element_quadrature = -1;  // default 2k+2
  int edge_quadrature = -1;     // default 2k+1
};

// How an edge enters the angle terms and which rotation DOFs it constrains.
enum class EdgeRole { Interior, Branch, Free, Moment, Symmetry, Clamped, Prescribed };

struct State {
  Eigen::VectorXd retained;                // u on vertex/edge nodes, then alpha
  std::vector<Eigen::VectorXd> condensed;  // per element: u interior, sigma, aux
  std::vector<std::vector<Vec3d>> lagged;  // per edge, per edge quadrature point
  double lambda = 0.0;
};

struct ElementEval {
  EnergyBreakdown energy;
  Eigen::VectorXd g;
  Eigen::MatrixXd H;
};

// Element-local factorization of the condensed block, symmetrically
// Jacobi scaled: Hcc^{-1} = D (D Hcc D)^{-1} D.
struct CondensationBlock {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::VectorXd d;
  Eigen::MatrixXd Hcr;
  Eigen::VectorXd gc;

  void factor(const Eigen::MatrixXd& Hcc);
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
};

struct AssembledSystem {
  Eigen::SparseMatrix<double> K;   // condensed tangent on free retained DOFs
  Eigen::VectorXd residual;        // condensed residual on free retained DOFs
  std::vector<CondensationBlock> blocks;
  double gradient_norm = 0.0;      // full first variation over all free DOFs
  EnergyBreakdown energy;
};

class Model {
 public:
  Model(SurfaceMesh mesh, Material material, ProblemSpec spec, ModelOptions options = {});

  const SurfaceMesh& mesh() const { return mesh_; }
  const Material& material() const { return material_; }
  const Spaces& spaces() const { return spaces_; }
  const DofMap& dofs() const { return spaces_.dofs; }
  const ModelOptions& options() const { return options_; }
  bool locking() const { return locking_; }
  int order() const { return options_.order; }
  EdgeRole edge_role(int e) const { return edge_role_[e]; }
  const QuadratureRule& edge_rule() const { return edge_rule_; }

  // Free retained DOFs (unconstrained) in increasing order; -1 if constrained.
  const std::vector<int>& free_index() const { return free_index_; }
  int free_count() const { return n_free_; }
  const std::vector<std::pair<int, double>>& dirichlet() const { return dirichlet_; }

  State initial_state() const;
  void apply_dirichlet(State& s, double lambda) const;

  // Element kernel at load factor `lambda`: value, gradient and Hessian over
  // the element-local DOF vector (layout of ElementDofs).
  void element_eval(int element, const Eigen::VectorXd& z, const std::vector<std::vector<Vec3d>>& lagged,
                    double lambda, bool hessian, ElementEval& out) const;
  Eigen::VectorXd gather(const State& s, int element) const;
  void scatter(State& s, int element, const Eigen::VectorXd& z) const;

  EnergyBreakdown lagrangian(const State& s) const;
  // Gradient over all retained DOFs (constrained included) and condensed DOFs.
  void gradient(const State& s, Eigen::VectorXd& g_retained, std::vector<Eigen::VectorXd>& g_condensed) const;

  AssembledSystem assemble(const State& s, bool hessian = true) const;
  // Uncondensed saddle-point system over [free retained | all condensed].
  void assemble_full(const State& s, Eigen::SparseMatrix<double>& K, Eigen::VectorXd& g) const;

  // Condensed DOF update for a retained (full-length) update dr.
  void recover_condensed(const AssembledSystem& sys, const Eigen::VectorXd& dr,
                         std::vector<Eigen::VectorXd>& dc) const;

  // Deformed averaged normals at every edge quadrature point.
  std::vector<std::vector<Vec3d>> averaged_normals(const State& s) const;
  void update_lagged(State& s) const;

  // Post-processing.
  Vec3d vertex_displacement(const State& s, int v) const;
  int probe_vertex(const std::string& name) const;
  Mat3d green_strain_at(const State& s, int element, const std::array<double, 2>& xi) const;
  Mat3d membrane_stress_at(const State& s, int element, const std::array<double, 2>& xi) const;
  // R / t from the auxiliary membrane field; requires the locking augmentation.
  Mat3d projected_membrane_stress_at(const State& s, int element, const std::array<double, 2>& xi) const;
  // Average over the elements containing p. With `projected`, uses
  // projected_membrane_stress_at when the augmentation is active.
  Mat3d membrane_stress_at_point(const State& s, const Vec3d& p, bool projected = false) const;
  // Moment tensor at a reference point (global 3x3).
  Mat3d moment_at(const State& s, int element, const std::array<double, 2>& xi) const;
  // Max Frobenius norm of the moment tensor over the quadrature points of
  // elements with the given region tag.
  double max_moment_norm(const State& s, const std::string& element_tag) const;

  // Reference conormal, tangent and normal at local edge point (for tests).
  struct EdgeSample {
    Vec3d x, tau, mu, nu;
  };
  EdgeSample edge_sample(int element, int local_edge, int q) const;

 private:
  struct VolumePoint {
    double wt = 0;
    std::array<Vec3d, 2> e;
    Vec3d nu;
    std::array<std::array<double, 2>, 2> gf{};  // gf[a][k] = dual_k . e_a
    double gam[2] = {0, 0};
    double W[3] = {0, 0, 0};  // frame components 11, 12, 22 of grad_tau nu
    std::vector<double> phi, psi;  // psi: auxiliary membrane basis
    std::vector<std::array<double, 2>> d1;
    std::vector<std::array<double, 3>> d2;
    Eigen::Matrix<double, 3, Eigen::Dynamic> sig;  // frame coefficients per moment DOF
  };
  struct EdgePoint {
    double wt = 0;
    std::array<Vec3d, 2> e;
    Vec3d nu, mu, tau, x;
    std::array<std::array<double, 2>, 2> gf{};
    double tau_f[2] = {0, 0};
    double mu_w[3] = {0, 0, 0};
    std::vector<double> phi, leg;
    std::vector<std::array<double, 2>> d1;
    Eigen::Matrix<double, 3, Eigen::Dynamic> sig;
    Eigen::Matrix<double, 1, Eigen::Dynamic> sig_mm;  // sigma_mu_mu per moment DOF
    int gq = 0;
    double theta_ref = 0;
    double nref_mu = 0;
  };
  struct LocalEdge {
    int edge = -1;
    bool same = true;
    int sign = 0;
    EdgeRole role = EdgeRole::Free;
    double moment = 0;
    Vec3d traction{0, 0, 0};
    std::vector<EdgePoint> pts;
  };
  struct ElementData {
    Shape shape = Shape::Tri;
    int n_nodes = 0;
    bool volume_bending = true;
    Vec3d area_load{0, 0, 0};
    std::vector<int> uidx;  // node*3+c -> local DOF index
    std::vector<VolumePoint> vol;
    std::vector<LocalEdge> edges;
  };

  void setup_roles_and_constraints();
  void setup_elements();
  void mirror_average(int edge, Vec3d& n) const;
  EdgePoint make_edge_point(int element, int le, int q, bool same) const;

  SurfaceMesh mesh_;
  Material material_;
  ProblemSpec spec_;
  ModelOptions options_;
  bool locking_ = false;
  Spaces spaces_;
  QuadratureRule vol_rule_[2];
  QuadratureRule edge_rule_;
  std::vector<EdgeRole> edge_role_;
  std::vector<double> edge_moment_;
  std::vector<int> mirror_axis_;  // symmetry plane axis per edge, -1 elsewhere
  std::vector<std::vector<Vec3d>> ref_normals_;
  std::vector<ElementData> elem_;
  std::vector<std::pair<int, double>> dirichlet_;
  std::vector<int> free_index_;
  int n_free_ = 0;
  std::vector<std::pair<int, Vec3d>> point_loads_;
};

}  // namespace shell
