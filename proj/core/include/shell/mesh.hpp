#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shell/tensor.hpp"

namespace shell {

enum class Shape { Tri, Quad };

inline int vertex_count(Shape s) { return s == Shape::Tri ? 3 : 4; }
const char* shape_name(Shape s);
Shape parse_shape(const std::string& name);

struct Element {
  Shape shape = Shape::Tri;
  std::vector<int> v;  // counterclockwise seen from the +normal side
  std::string tag;

  int local_edge_count() const { return vertex_count(shape); }
  // Endpoints of local edge le in local traversal order.
  std::array<int, 2> local_edge(int le) const {
    const int n = vertex_count(shape);
    return {v[le], v[(le + 1) % n]};
  }
};

struct Incidence {
  int element = -1;
  int local_edge = -1;
  // +1 if the local traversal runs from v[0] to v[1] of the edge.
  bool same_direction = true;
  // mu = sign * (nu x tau_e) is the outward conormal of the element.
  int sign = 0;
};

enum class EdgeKind { Boundary, Interior, Branch };

struct Edge {
  std::array<int, 2> v{};  // v[0] < v[1]; tau_e points from v[0] to v[1]
  std::vector<Incidence> inc;
  EdgeKind kind = EdgeKind::Boundary;
  std::string tag;     // boundary tag; empty when untagged
  bool kink = false;   // dihedral above the kink threshold
  double dihedral = 0.0;
};

// Edges selected either by explicit vertex pairs or by a geometric predicate
// that must hold at both endpoints and the midpoint.
struct BoundarySpec {
  std::string tag;
  std::vector<std::array<int, 2>> edges;
  std::function<bool(const Vec3d&)> predicate;
};

struct TopologyOptions {
  // Flip elements so that neighbors agree; otherwise disagreement throws.
  bool normalize_orientation = false;
  // With normalization, orient each connected component so that its area
  // weighted mean normal has a positive component along `up`.
  std::optional<Vec3d> up;
  double kink_angle_deg = 15.0;
};

class SurfaceMesh {
 public:
  std::vector<Vec3d> vertices;
  std::vector<Element> elements;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> element_edges;  // global edge per local edge
  std::map<std::string, Vec3d> probes;

  int edge_between(int a, int b) const;  // -1 if absent
  std::vector<int> edges_with_tag(const std::string& tag) const;
  std::vector<int> vertices_with_tag(const std::string& tag) const;
  std::vector<std::string> tags() const;
  // Nearest vertex; ties resolve to the lowest index.
  int nearest_vertex(const Vec3d& p) const;
  bool has_branch_edges() const;
  bool has_kink_edges() const;
  double characteristic_length() const;

  // Re-derived boundary specs reproducing the current tags.
  std::vector<BoundarySpec> boundary_specs() const;
};

SurfaceMesh build_topology(const std::vector<Vec3d>& vertices,
                           const std::vector<Element>& elements,
                           const std::vector<BoundarySpec>& boundary_specs,
                           const TopologyOptions& options = {});

// Rebuild from a mesh's own vertices, elements and tags.
SurfaceMesh rebuild(const SurfaceMesh& mesh, const TopologyOptions& options = {});

// Geometry of the flat triangle / bilinear quad map at a reference point.
// Reference triangle (0,0),(1,0),(0,1); reference square [0,1]^2 with
// corners (0,0),(1,0),(1,1),(0,1).
struct GeometryFrame {
  std::array<Vec3d, 2> jac;      // dPhi/dxi_a
  Vec3d d12;                     // d^2 Phi / dxi_1 dxi_2 (zero for triangles)
  Vec3d normal;                  // unit reference normal nu
  Mat3d projector;               // P = I - nu nu^T
  Mat3d weingarten;              // grad_tau nu, symmetric and tangential
  double weight = 0.0;           // |Phi_1 x Phi_2|
  std::array<Vec3d, 2> dual;     // rows of the pseudo-inverse of jac
  std::array<Vec3d, 2> frame;    // orthonormal tangent frame e1, e2
  Vec3d position;
};

GeometryFrame geometry_frame(const SurfaceMesh& mesh, int element,
                             const std::array<double, 2>& xi);
GeometryFrame geometry_frame(Shape shape, const Vec3d* x,
                             const std::array<double, 2>& xi);

bool inside_reference(Shape shape, const std::array<double, 2>& xi, double tol = 1e-12);
// Reference vertex coordinates.
std::array<double, 2> reference_vertex(Shape shape, int i);
// Reference point on local edge le at local parameter s in [0,1].
std::array<double, 2> reference_edge_point(Shape shape, int le, double s);

Vec3d map_point(Shape shape, const Vec3d* x, const std::array<double, 2>& xi);

// Inverse geometry map; returns the reference point when p lies on the
// element within tol (distance), otherwise nullopt.
std::optional<std::array<double, 2>> locate(const SurfaceMesh& mesh, int element,
                                            const Vec3d& p, double tol);

// JSON document: vertices, elements {shape,nodes,tag}, boundaries, probes.
std::string mesh_to_json(const SurfaceMesh& mesh);
SurfaceMesh mesh_from_json(const std::string& text, const TopologyOptions& options = {});
void save_mesh(const SurfaceMesh& mesh, const std::string& path);
SurfaceMesh load_mesh(const std::string& path, const TopologyOptions& options = {});

}  // namespace shell
