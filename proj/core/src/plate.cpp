#include "shell/plate.hpp"

#include <cmath>
#include <set>

#include <Eigen/SparseLU>

#include "shell/error.hpp"
#include "shell/kinematics.hpp"
#include "shell/quadrature.hpp"

namespace shell {

namespace {

RefDomain domain_of(Shape s) { return s == Shape::Tri ? RefDomain::Tri : RefDomain::Quad; }

const Incidence& incidence_of(const SurfaceMesh& mesh, int element, int le) {
  const Edge& e = mesh.edges[mesh.element_edges[element][le]];
  for (const Incidence& inc : e.inc)
    if (inc.element == element && inc.local_edge == le) return inc;
  throw TopologyError("edge incidence missing for element " + std::to_string(element));
}

void require_flat(const SurfaceMesh& mesh) {
  const double tol = 1e-12 * std::max(1.0, mesh.characteristic_length());
  for (const Vec3d& x : mesh.vertices)
    if (std::abs(x[2]) > tol) throw ConfigError("plate mode needs a flat mesh in the x-y plane");
  for (int t = 0; t < static_cast<int>(mesh.elements.size()); ++t)
    if (geometry_frame(mesh, t, {1.0 / 3.0, 1.0 / 3.0}).normal[2] <= 0.0)
      throw ConfigError("plate mode needs upward element normals");
}

}  // namespace

PlateElementSystem hhj_plate_element(const SurfaceMesh& mesh, const Spaces& spaces, int t, const Material& mat,
                                     double f) {
  const Element& el = mesh.elements[t];
  const LagrangeBasis& lb = spaces.basis(el.shape);
  const MomentBasis& mb = spaces.moments(el.shape);
  const int k = spaces.order;
  const int nv = vertex_count(el.shape);
  PlateElementSystem out;
  out.n_w = lb.size();
  out.n_alpha = nv * k;
  out.n_sigma = mb.size();
  const int nw = out.n_w, a0 = out.n_w, s0 = out.n_w + out.n_alpha;
  const int n = nw + out.n_alpha + out.n_sigma;
  out.H = Eigen::MatrixXd::Zero(n, n);
  out.b = Eigen::VectorXd::Zero(n);

  Vec3d X[4];
  for (int i = 0; i < nv; ++i) X[i] = mesh.vertices[el.v[i]];
  const double cs = 6.0 / (mat.t * mat.t * mat.t);
  const double beta = mat.minv_trace_coefficient();
  const Vec3d up{0.0, 0.0, 1.0};

  std::vector<double> phi(nw);
  std::vector<std::array<double, 2>> d1(nw);
  std::vector<std::array<double, 3>> d2(nw);
  std::vector<std::array<double, 3>> sb(out.n_sigma);
  std::vector<Mat3d> S(out.n_sigma);
  auto moment_tensors = [&](const std::array<double, 2>& xi, const GeometryFrame& g) {
    mb.eval(xi, g, sb.data());
    for (int d = 0; d < out.n_sigma; ++d) {
      S[d] = Mat3d{};
      for (int c = 0; c < 3; ++c) S[d] = S[d] + sb[d][c] * frame_tensor(g.frame, c);
    }
  };

  const QuadratureRule vol = quadrature_for(domain_of(el.shape), 2 * k + 2);
  for (std::size_t q = 0; q < vol.size(); ++q) {
    const auto& xi = vol.points[q];
    const GeometryFrame g = geometry_frame(el.shape, X, xi);
    const double wt = vol.weights[q] * g.weight;
    lb.eval(xi, phi.data(), d1.data(), d2.data());
    moment_tensors(xi, g);
    for (int d = 0; d < out.n_sigma; ++d)
      for (int e = 0; e < out.n_sigma; ++e)
        out.H(s0 + d, s0 + e) += -2.0 * cs * wt * (1.0 + mat.nu) / mat.E *
                                 (ddot(S[d], S[e]) - beta * trace(S[d]) * trace(S[e]));
    for (int a = 0; a < nw; ++a) {
      const Mat3d hess = weighted_surface_hessian(g, {{{0, 0}, {0, 0}, d1[a]}}, {{{0, 0, 0}, {0, 0, 0}, d2[a]}}, up);
      for (int d = 0; d < out.n_sigma; ++d) {
        const double v = -wt * ddot(S[d], hess);
        out.H(a, s0 + d) += v;
        out.H(s0 + d, a) += v;
      }
      out.b[a] -= wt * f * phi[a];
    }
  }

  const QuadratureRule edge = quadrature_for(RefDomain::Edge, 2 * k + 1);
  std::vector<double> leg(k);
  for (int le = 0; le < nv; ++le) {
    const Incidence& inc = incidence_of(mesh, t, le);
    const auto ends = el.local_edge(le);
    const Vec3d xa = mesh.vertices[ends[0]], xb = mesh.vertices[ends[1]];
    const double len = norm(xb - xa);
    const Vec3d tau = (xb - xa) / len;
    for (std::size_t q = 0; q < edge.size(); ++q) {
      const double s = edge.points[q][0];
      const auto xi = reference_edge_point(el.shape, le, s);
      const GeometryFrame g = geometry_frame(el.shape, X, xi);
      const double wt = edge.weights[q] * len;
      const Vec3d mu = normalized(cross(tau, g.normal));
      lb.eval(xi, phi.data(), d1.data());
      moment_tensors(xi, g);
      legendre_values(k, inc.same_direction ? s : 1.0 - s, leg.data());
      for (int d = 0; d < out.n_sigma; ++d) {
        const double smm = dot(mu, S[d] * mu);
        for (int a = 0; a < nw; ++a) {
          const double dmu = dot(d1[a][0] * g.dual[0] + d1[a][1] * g.dual[1], mu);
          out.H(a, s0 + d) += wt * dmu * smm;
          out.H(s0 + d, a) += wt * dmu * smm;
        }
        for (int j = 0; j < k; ++j) {
          const double v = -wt * inc.sign * leg[j] * smm;
          out.H(a0 + le * k + j, s0 + d) += v;
          out.H(s0 + d, a0 + le * k + j) += v;
        }
      }
    }
  }
  return out;
}

PlateSystem assemble_hhj_plate(const SurfaceMesh& mesh, int k, const Material& mat, double f) {
  require_flat(mesh);
  mat.validate();
  const Spaces sp = make_spaces(mesh, k, false);
  const DofMap& d = sp.dofs;
  const int nel = static_cast<int>(mesh.elements.size());

  // Displacement DOFs come in triples, so u index / 3 numbers the nodes.
  PlateSystem sys;
  int n_interior = 0, n_sigma = 0;
  for (int t = 0; t < nel; ++t) {
    n_interior += sp.basis(mesh.elements[t].shape).interior_size();
    n_sigma += d.elements[t].n_sigma;
  }
  sys.n_w = d.n_u / 3 + n_interior;
  sys.n_alpha = d.n_retained - d.n_u;
  sys.n_sigma = n_sigma;
  sys.element_index.resize(nel);

  std::vector<Eigen::Triplet<double>> trip;
  sys.b = Eigen::VectorXd::Zero(sys.size());
  int next_interior = d.n_u / 3, next_sigma = sys.n_w + sys.n_alpha;
  for (int t = 0; t < nel; ++t) {
    const ElementDofs& ed = d.elements[t];
    const LagrangeBasis& lb = sp.basis(mesh.elements[t].shape);
    std::vector<int>& idx = sys.element_index[t];
    for (int n = 0; n < lb.size(); ++n)
      idx.push_back(n < lb.boundary_size() ? ed.retained[3 * n] / 3 : next_interior++);
    for (int j = 0; j < ed.n_alpha; ++j) idx.push_back(sys.n_w + ed.retained[ed.alpha_begin() + j] - d.n_u);
    for (int j = 0; j < ed.n_sigma; ++j) idx.push_back(next_sigma++);

    const PlateElementSystem es = hhj_plate_element(mesh, sp, t, mat, f);
    for (int r = 0; r < es.H.rows(); ++r) {
      sys.b[idx[r]] += es.b[r];
      for (int c = 0; c < es.H.cols(); ++c)
        if (es.H(r, c) != 0.0) trip.emplace_back(idx[r], idx[c], es.H(r, c));
    }
  }
  sys.H.resize(sys.size(), sys.size());
  sys.H.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

double hhj_plate_lagrangian(const PlateSystem& sys, const Eigen::VectorXd& x) {
  if (x.size() != sys.size()) throw ConfigError("plate state has the wrong length");
  return 0.5 * x.dot(sys.H * x) + sys.b.dot(x);
}

PlateSolution solve_hhj_plate(const SurfaceMesh& mesh, int k, const Material& mat, double f,
                              const std::vector<std::string>& clamped_tags) {
  PlateSolution sol;
  sol.system = assemble_hhj_plate(mesh, k, mat, f);
  sol.spaces = make_spaces(mesh, k, false);
  const PlateSystem& sys = sol.system;

  std::set<int> fixed;
  for (const std::string& tag : clamped_tags) {
    const std::vector<int> edges = mesh.edges_with_tag(tag);
    if (edges.empty()) throw ConfigError("clamped tag '" + tag + "' has no edges");
    for (int e : edges) {
      const Incidence& inc = mesh.edges[e].inc.front();
      const Element& el = mesh.elements[inc.element];
      const LagrangeBasis& lb = sol.spaces.basis(el.shape);
      const int nv = vertex_count(el.shape);
      const std::vector<int>& idx = sys.element_index[inc.element];
      fixed.insert(idx[inc.local_edge]);
      fixed.insert(idx[(inc.local_edge + 1) % nv]);
      for (int j = 0; j + 1 < k; ++j) fixed.insert(idx[lb.edge_node(inc.local_edge, j)]);
      for (int j = 0; j < k; ++j) fixed.insert(idx[lb.size() + inc.local_edge * k + j]);
    }
  }
  std::vector<int> free(sys.size(), -1);
  int nf = 0;
  for (int i = 0; i < sys.size(); ++i)
    if (!fixed.count(i)) free[i] = nf++;
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < sys.H.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.H, c); it; ++it)
      if (free[it.row()] >= 0 && free[it.col()] >= 0) trip.emplace_back(free[it.row()], free[it.col()], it.value());
  Eigen::SparseMatrix<double> K(nf, nf);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(nf);
  for (int i = 0; i < sys.size(); ++i)
    if (free[i] >= 0) rhs[free[i]] = -sys.b[i];

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(K);
  if (lu.info() != Eigen::Success) throw SolverError("plate system is singular");
  const Eigen::VectorXd y = lu.solve(rhs);
  sol.x = Eigen::VectorXd::Zero(sys.size());
  for (int i = 0; i < sys.size(); ++i)
    if (free[i] >= 0) sol.x[i] = y[free[i]];
  return sol;
}

double plate_deflection_at(const SurfaceMesh& mesh, const PlateSolution& sol, const Vec3d& p) {
  const double tol = 1e-9 * std::max(1.0, mesh.characteristic_length());
  for (int t = 0; t < static_cast<int>(mesh.elements.size()); ++t) {
    const auto xi = locate(mesh, t, p, tol);
    if (!xi) continue;
    const LagrangeBasis& lb = sol.spaces.basis(mesh.elements[t].shape);
    std::vector<double> phi(lb.size());
    lb.eval(*xi, phi.data());
    double w = 0.0;
    for (int a = 0; a < lb.size(); ++a) w += phi[a] * sol.x[sol.system.element_index[t][a]];
    return w;
  }
  throw ConfigError("point lies outside the plate mesh");
}

}  // namespace shell
