#include "shell/spaces.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "shell/error.hpp"

namespace shell {

namespace {

std::vector<std::array<int, 2>> monomials(Shape shape, int k) {
  std::vector<std::array<int, 2>> e;
  for (int j = 0; j <= k; ++j)
    for (int i = 0; i <= k; ++i)
      if (shape == Shape::Quad || i + j <= k) e.push_back({i, j});
  return e;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

LagrangeBasis::LagrangeBasis(Shape shape, int k) : shape_(shape), k_(k) {
  if (k < 1) throw ConfigError("Lagrange order must be at least 1");
  const int nv = vertex_count(shape);
  for (int i = 0; i < nv; ++i) nodes_.push_back(reference_vertex(shape, i));
  for (int le = 0; le < nv; ++le)
    for (int j = 1; j < k; ++j)
      nodes_.push_back(reference_edge_point(shape, le, static_cast<double>(j) / k));
  interior_begin_ = static_cast<int>(nodes_.size());
  for (int j = 1; j < k; ++j)
    for (int i = 1; i < k; ++i)
      if (shape == Shape::Quad || i + j < k)
        nodes_.push_back({static_cast<double>(i) / k, static_cast<double>(j) / k});

  exps_ = monomials(shape, k);
  const int n = size();
  if (static_cast<int>(exps_.size()) != n) throw Error("Lagrange node count mismatch");
  Eigen::MatrixXd V(n, n);
  for (int p = 0; p < n; ++p)
    for (int m = 0; m < n; ++m)
      V(p, m) = ipow(nodes_[p][0], exps_[m][0]) * ipow(nodes_[p][1], exps_[m][1]);
  const Eigen::MatrixXd C = V.fullPivLu().inverse();
  coef_.assign(n * n, 0.0);
  for (int m = 0; m < n; ++m)
    for (int q = 0; q < n; ++q) coef_[m * n + q] = C(m, q);
}

void LagrangeBasis::eval(const std::array<double, 2>& xi, double* val, std::array<double, 2>* d1,
                         std::array<double, 3>* d2) const {
  const int n = size();
  const double x = xi[0], y = xi[1];
  for (int q = 0; q < n; ++q) {
    if (val) val[q] = 0.0;
    if (d1) d1[q] = {0.0, 0.0};
    if (d2) d2[q] = {0.0, 0.0, 0.0};
  }
  for (int m = 0; m < n; ++m) {
    const int a = exps_[m][0], b = exps_[m][1];
    const double xa = ipow(x, a), yb = ipow(y, b);
    const double mv = xa * yb;
    const double mx = a > 0 ? a * ipow(x, a - 1) * yb : 0.0;
    const double my = b > 0 ? b * xa * ipow(y, b - 1) : 0.0;
    const double mxx = a > 1 ? a * (a - 1) * ipow(x, a - 2) * yb : 0.0;
    const double mxy = (a > 0 && b > 0) ? a * b * ipow(x, a - 1) * ipow(y, b - 1) : 0.0;
    const double myy = b > 1 ? b * (b - 1) * xa * ipow(y, b - 2) : 0.0;
    const double* c = &coef_[m * n];
    for (int q = 0; q < n; ++q) {
      if (c[q] == 0.0) continue;
      if (val) val[q] += c[q] * mv;
      if (d1) {
        d1[q][0] += c[q] * mx;
        d1[q][1] += c[q] * my;
      }
      if (d2) {
        d2[q][0] += c[q] * mxx;
        d2[q][1] += c[q] * mxy;
        d2[q][2] += c[q] * myy;
      }
    }
  }
}

void eval_shape(const LagrangeBasis& basis, const std::array<double, 2>& xi, double* val,
                std::array<double, 2>* d1, std::array<double, 3>* d2) {
  if (!inside_reference(basis.shape(), xi, 1e-12))
    throw GeometryError("evaluation point outside the reference element");
  basis.eval(xi, val, d1, d2);
}

PolySpace::PolySpace(Shape shape, int m) : shape_(shape) {
  if (m < 0) throw ConfigError("polynomial order must be non-negative");
  exps_ = monomials(shape, m);
  center_ = shape == Shape::Tri ? std::array<double, 2>{1.0 / 3, 1.0 / 3}
                                : std::array<double, 2>{0.5, 0.5};
}

void PolySpace::eval(const std::array<double, 2>& xi, double* val) const {
  const double x = xi[0] - center_[0], y = xi[1] - center_[1];
  for (std::size_t m = 0; m < exps_.size(); ++m) val[m] = ipow(x, exps_[m][0]) * ipow(y, exps_[m][1]);
}

MomentBasis::MomentBasis(Shape shape, int m) : shape_(shape) {
  if (m < 0) throw ConfigError("polynomial order must be non-negative");
  center_ = shape == Shape::Tri ? std::array<double, 2>{1.0 / 3, 1.0 / 3} : std::array<double, 2>{0.5, 0.5};
  if (shape == Shape::Tri) {
    const auto ex = monomials(shape, m);
    for (int c = 0; c < 3; ++c)
      for (const auto& e : ex) terms_.push_back({c, e[0], e[1]});
    return;
  }
  const int deg[3][2] = {{m + 1, m}, {m, m}, {m, m + 1}};
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j <= deg[c][1]; ++j)
      for (int i = 0; i <= deg[c][0]; ++i) terms_.push_back({c, i, j});
}

void MomentBasis::eval(const std::array<double, 2>& xi, const GeometryFrame& g, std::array<double, 3>* out) const {
  const double x = xi[0] - center_[0], y = xi[1] - center_[1];
  std::array<double, 3> comp[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  if (shape_ == Shape::Quad) {
    double f[2][2];
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 2; ++a) f[c][a] = dot(g.jac[c], g.frame[a]);
    const double w2 = g.weight * g.weight;
    comp[0] = {f[0][0] * f[0][0] / w2, 2.0 * f[0][0] * f[0][1] / w2, f[0][1] * f[0][1] / w2};
    comp[1] = {f[0][0] * f[1][0] / w2, (f[0][0] * f[1][1] + f[0][1] * f[1][0]) / w2, f[0][1] * f[1][1] / w2};
    comp[2] = {f[1][0] * f[1][0] / w2, 2.0 * f[1][0] * f[1][1] / w2, f[1][1] * f[1][1] / w2};
  }
  for (std::size_t d = 0; d < terms_.size(); ++d) {
    const double p = ipow(x, terms_[d][1]) * ipow(y, terms_[d][2]);
    const auto& c = comp[terms_[d][0]];
    out[d] = {c[0] * p, c[1] * p, c[2] * p};
  }
}

void legendre_values(int n, double t, double* out) {
  const double x = 2.0 * t - 1.0;
  if (n > 0) out[0] = 1.0;
  if (n > 1) out[1] = x;
  for (int j = 2; j < n; ++j) out[j] = ((2.0 * j - 1.0) * x * out[j - 1] - (j - 1.0) * out[j - 2]) / j;
}

Mat3d frame_tensor(const std::array<Vec3d, 2>& frame, int c) {
  if (c == 0) return outer(frame[0], frame[0]);
  if (c == 2) return outer(frame[1], frame[1]);
  return 0.5 * (outer(frame[0], frame[1]) + outer(frame[1], frame[0]));
}

int DofMap::total_condensed() const {
  int s = 0;
  for (const ElementDofs& e : elements) s += e.n_condensed();
  return s;
}

Spaces make_spaces(const SurfaceMesh& mesh, int k, bool with_aux) {
  if (k < 1) throw ConfigError("polynomial order k must be at least 1");
  Spaces sp;
  sp.order = k;
  sp.aux = with_aux;
  for (Shape s : {Shape::Tri, Shape::Quad}) {
    sp.lagrange[static_cast<int>(s)] = LagrangeBasis(s, k);
    sp.poly[static_cast<int>(s)] = PolySpace(s, k - 1);
    sp.moment_basis[static_cast<int>(s)] = MomentBasis(s, k - 1);
  }
  const int nv = static_cast<int>(mesh.vertices.size());
  const int ne = static_cast<int>(mesh.edges.size());

  DofMap& d = sp.dofs;
  d.order = k;
  int next = 0;
  d.vertex_base.resize(nv);
  for (int v = 0; v < nv; ++v, next += 3) d.vertex_base[v] = next;
  d.edge_u_base.resize(ne);
  for (int e = 0; e < ne; ++e, next += 3 * (k - 1)) d.edge_u_base[e] = next;
  d.n_u = next;
  d.edge_alpha_base.resize(ne);
  for (int e = 0; e < ne; ++e, next += k) d.edge_alpha_base[e] = next;
  d.n_retained = next;

  int n_int_u = 0, n_sigma = 0, n_aux = 0;
  d.elements.resize(mesh.elements.size());
  for (std::size_t t = 0; t < mesh.elements.size(); ++t) {
    const Element& el = mesh.elements[t];
    const LagrangeBasis& lb = sp.basis(el.shape);
    const int nle = el.local_edge_count();
    ElementDofs& ed = d.elements[t];
    ed.n_u_boundary = 3 * lb.boundary_size();
    ed.n_alpha = nle * k;
    ed.n_u_interior = 3 * lb.interior_size();
    ed.n_sigma = sp.moments(el.shape).size();
    ed.n_aux = with_aux ? 3 * sp.tensor_poly(el.shape).size() : 0;
    ed.retained.assign(ed.n_retained(), -1);
    for (int i = 0; i < nle; ++i)
      for (int c = 0; c < 3; ++c) ed.retained[3 * i + c] = d.u_vertex(el.v[i], c);
    for (int le = 0; le < nle; ++le) {
      const int e = mesh.element_edges[t][le];
      bool same = true;
      for (const Incidence& in : mesh.edges[e].inc)
        if (in.element == static_cast<int>(t) && in.local_edge == le) same = in.same_direction;
      for (int j = 0; j + 1 < k; ++j) {
        const int gj = same ? j : k - 2 - j;
        for (int c = 0; c < 3; ++c)
          ed.retained[3 * lb.edge_node(le, j) + c] = d.edge_u_base[e] + 3 * gj + c;
      }
      for (int j = 0; j < k; ++j) ed.retained[ed.alpha_begin() + le * k + j] = d.alpha(e, j);
    }
    n_int_u += ed.n_u_interior;
    n_sigma += ed.n_sigma;
    n_aux += ed.n_aux;
  }

  const int pt = sp.tensor_poly(Shape::Tri).size(), pq = sp.tensor_poly(Shape::Quad).size();
  const LagrangeBasis& lt = sp.basis(Shape::Tri);
  const LagrangeBasis& lq = sp.basis(Shape::Quad);
  sp.displacement = {SpaceKind::LagrangeVector, k, 3, 3 * (k - 1), 3 * lt.interior_size(),
                     3 * lq.interior_size(), d.n_u + n_int_u, false};
  sp.moment = {SpaceKind::MomentTensor, k - 1, 0, 0, sp.moments(Shape::Tri).size(),
               sp.moments(Shape::Quad).size(), n_sigma, true};
  sp.rotation = {SpaceKind::EdgeRotation, k - 1, 0, k, 0, 0, k * ne, false};
  sp.membrane_aux = {SpaceKind::MembraneAux, k - 1, 0, 0, with_aux ? 3 * pt : 0,
                     with_aux ? 3 * pq : 0, n_aux, true};
  return sp;
}

}  // namespace shell
