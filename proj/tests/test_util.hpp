#pragma once

#include <functional>

#include "shell/model.hpp"

namespace shell::test_util {

// Writes u(X) into every displacement DOF of the state, node by node.
inline void set_displacement(const Model& model, State& s, const std::function<Vec3d(const Vec3d&)>& u) {
  const SurfaceMesh& mesh = model.mesh();
  for (int t = 0; t < static_cast<int>(mesh.elements.size()); ++t) {
    const Element& el = mesh.elements[t];
    const LagrangeBasis& lb = model.spaces().basis(el.shape);
    const ElementDofs& ed = model.dofs().elements[t];
    Vec3d X[4];
    for (int i = 0; i < vertex_count(el.shape); ++i) X[i] = mesh.vertices[el.v[i]];
    Eigen::VectorXd z = model.gather(s, t);
    for (int n = 0; n < lb.size(); ++n) {
      const Vec3d v = u(map_point(el.shape, X, lb.nodes()[n]));
      const int base = n < lb.boundary_size() ? 3 * n : ed.u_interior_begin() + 3 * (n - lb.boundary_size());
      for (int c = 0; c < 3; ++c) z[base + c] = v[c];
    }
    model.scatter(s, t, z);
  }
}

}  // namespace shell::test_util
