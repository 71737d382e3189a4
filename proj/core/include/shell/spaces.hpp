#pragma once

#include <array>
#include <vector>

#include "shell/mesh.hpp"
#include "shell/tensor.hpp"

namespace shell {

// Scalar Lagrange basis of order k with equispaced nodes.
// Node layout: vertices, then k-1 nodes per local edge in traversal order,
// then interior nodes.
class LagrangeBasis {
 public:
  LagrangeBasis() = default;
  LagrangeBasis(Shape shape, int k);

  Shape shape() const { return shape_; }
  int order() const { return k_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int boundary_size() const { return interior_begin_; }
  int interior_size() const { return size() - interior_begin_; }
  int edge_node(int le, int j) const { return vertex_count(shape_) + le * (k_ - 1) + j; }
  const std::vector<std::array<double, 2>>& nodes() const { return nodes_; }

  // val[n], d1[n][a] = d/dxi_a, d2[n] = {d11, d12, d22}. Null outputs skipped.
  void eval(const std::array<double, 2>& xi, double* val, std::array<double, 2>* d1 = nullptr,
            std::array<double, 3>* d2 = nullptr) const;

 private:
  Shape shape_ = Shape::Tri;
  int k_ = 1;
  int interior_begin_ = 0;
  std::vector<std::array<double, 2>> nodes_;
  std::vector<std::array<int, 2>> exps_;
  std::vector<double> coef_;  // coef_[m * size + n]: monomial m in basis n
};

// Scalar P_m (triangle) or Q_m (quad) basis used for discontinuous tensor
// fields. Monomials centered at the reference centroid.
class PolySpace {
 public:
  PolySpace() = default;
  PolySpace(Shape shape, int m);
  int size() const { return static_cast<int>(exps_.size()); }
  void eval(const std::array<double, 2>& xi, double* val) const;

 private:
  Shape shape_ = Shape::Tri;
  std::array<double, 2> center_{};
  std::vector<std::array<int, 2>> exps_;
};

// Discontinuous moment-tensor basis of order m. Triangles use P_m for each
// frame component. Quads use the mapped reference tensors
// Phi_c (x) Phi_d / |Phi_1 x Phi_2|^2 with coefficients in Q_{m+1,m} (11),
// Q_{m,m} (12) and Q_{m,m+1} (22); the normal-normal trace on every edge then
// spans the full P_m, which the hybridized bending system needs to be
// nonsingular on quad meshes.
class MomentBasis {
 public:
  MomentBasis() = default;
  MomentBasis(Shape shape, int m);
  int size() const { return static_cast<int>(terms_.size()); }
  // out[d] = frame coefficients (c1, c2, c3) of basis tensor d in the basis
  // e1e1, sym(e1e2), e2e2 of g.frame.
  void eval(const std::array<double, 2>& xi, const GeometryFrame& g, std::array<double, 3>* out) const;

 private:
  Shape shape_ = Shape::Tri;
  std::array<double, 2> center_{};
  std::vector<std::array<int, 3>> terms_;  // tensor component, exponent xi1, exponent xi2
};

// Legendre polynomials P_j(2t-1), j < n, on the unit edge.
void legendre_values(int n, double t, double* out);

// Symmetric tangential tensor for frame component c in {0,1,2}:
// e1 e1^T, sym(e1 e2^T), e2 e2^T.
Mat3d frame_tensor(const std::array<Vec3d, 2>& frame, int c);

enum class SpaceKind { LagrangeVector, MomentTensor, EdgeRotation, MembraneAux };

struct FeSpace {
  SpaceKind kind = SpaceKind::LagrangeVector;
  int order = 1;
  int per_vertex = 0;
  int per_edge = 0;
  int per_tri = 0;   // element-owned DOFs on a triangle
  int per_quad = 0;  // element-owned DOFs on a quad
  int total = 0;
  bool condensable = false;
};

// Element gather data. Local DOF vector layout:
//   [u on vertex/edge nodes (node*3+c)] [alpha (local edge * k + j)]
//   [u on interior nodes] [sigma (MomentBasis order)] [aux (c * n_poly + m)]
// The first n_retained entries map to global retained DOFs; the rest are
// element-local and condensed.
struct ElementDofs {
  std::vector<int> retained;  // global index per retained local DOF
  int n_u_boundary = 0;
  int n_alpha = 0;
  int n_u_interior = 0;
  int n_sigma = 0;
  int n_aux = 0;

  int n_retained() const { return n_u_boundary + n_alpha; }
  int n_condensed() const { return n_u_interior + n_sigma + n_aux; }
  int n_local() const { return n_retained() + n_condensed(); }
  int alpha_begin() const { return n_u_boundary; }
  int u_interior_begin() const { return n_retained(); }
  int sigma_begin() const { return n_retained() + n_u_interior; }
  int aux_begin() const { return sigma_begin() + n_sigma; }
};

struct DofMap {
  int order = 1;
  int n_retained = 0;
  int n_u = 0;  // retained displacement DOFs; alpha DOFs follow
  std::vector<int> vertex_base;      // 3 DOFs per vertex
  std::vector<int> edge_u_base;      // 3(k-1) DOFs per edge
  std::vector<int> edge_alpha_base;  // k DOFs per edge
  std::vector<ElementDofs> elements;

  int u_vertex(int v, int comp) const { return vertex_base[v] + comp; }
  int alpha(int edge, int j) const { return edge_alpha_base[edge] + j; }
  int total_condensed() const;
};

struct Spaces {
  int order = 1;
  bool aux = false;
  FeSpace displacement, moment, rotation, membrane_aux;
  DofMap dofs;
  LagrangeBasis lagrange[2];  // indexed by Shape
  PolySpace poly[2];          // order k-1, indexed by Shape
  MomentBasis moment_basis[2];  // order k-1, indexed by Shape

  const LagrangeBasis& basis(Shape s) const { return lagrange[static_cast<int>(s)]; }
  const PolySpace& tensor_poly(Shape s) const { return poly[static_cast<int>(s)]; }
  const MomentBasis& moments(Shape s) const { return moment_basis[static_cast<int>(s)]; }
};

// Displacement order k; moment, rotation and auxiliary membrane fields of
// order k-1. `with_aux` adds the membrane auxiliary field.
Spaces make_spaces(const SurfaceMesh& mesh, int k, bool with_aux);

// Checked evaluation of a Lagrange basis (throws outside the reference domain).
void eval_shape(const LagrangeBasis& basis, const std::array<double, 2>& xi, double* val,
                std::array<double, 2>* d1 = nullptr, std::array<double, 3>* d2 = nullptr);

}  // namespace shell
