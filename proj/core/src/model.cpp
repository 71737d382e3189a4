#include "shell/model.hpp"

#include <cmath>
#include <map>
#include <set>

#include "shell/error.hpp"

namespace shell {

namespace {

using J6 = Jet2<6>;
using J15 = Jet2<15>;

// Variable layout of the pointwise kernels: p[2i+k] = d u_i / d xi_k, then
// r[6+3i+cd] = d_cd u_i. var_of[i][col] lists the variables of component i
// in the column order of the per-node shape derivative matrix.
constexpr int kVarOf[3][5] = {{0, 1, 6, 7, 8}, {2, 3, 9, 10, 11}, {4, 5, 12, 13, 14}};

J15 embed(const J6& a) {
  J15 b(a.val);
  for (int i = 0; i < 6; ++i) b.g[i] = a.g[i];
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) b.h[J15::packed(i, j)] = a.h[J6::packed(i, j)];
  return b;
}

template <int N>
void add_jet(const Jet2<N>& f, double w, Eigen::Matrix<double, 15, 1>& gq, Eigen::Matrix<double, 15, 15>& Hq) {
  for (int i = 0; i < N; ++i) {
    gq(i) += w * f.g[i];
    for (int j = i; j < N; ++j) {
      const double h = w * f.h[Jet2<N>::packed(i, j)];
      Hq(i, j) += h;
      if (j != i) Hq(j, i) += h;
    }
  }
}

template <int N>
Vec3<Jet2<N>> unit_normal(const std::array<Vec3<Jet2<N>>, 2>& fe, int element) {
  const Vec3<Jet2<N>> c = cross(fe[0], fe[1]);
  const Jet2<N> J = sqrt(dot(c, c));
  if (!(J.val > kDegenerateJ))
    throw DegenerateDeformation("deformation collapses the element (J <= tol)", element);
  const Jet2<N> inv = inverse(J);
  return {c[0] * inv, c[1] * inv, c[2] * inv};
}

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-14 * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

Model::Model(SurfaceMesh mesh, Material material, ProblemSpec spec, ModelOptions options)
    : mesh_(std::move(mesh)), material_(material), spec_(std::move(spec)), options_(options) {
  material_.validate();
  const int k = options_.order;
  if (k < 1 || k > 4) throw ConfigError("polynomial order must lie in 1..4");
  if (mesh_.elements.empty()) throw ConfigError("mesh has no elements");
  locking_ = options_.locking.value_or(k >= 2);
  if (options_.angle == AngleMode::Simplified && (mesh_.has_kink_edges() || mesh_.has_branch_edges()))
    throw ConfigError("simplified angle mode is not valid on meshes with kinks or branch edges");
  spaces_ = make_spaces(mesh_, k, locking_);
  const int vdeg = options_.element_quadrature > 0 ? options_.element_quadrature : 2 * k + 2;
  const int edeg = options_.edge_quadrature > 0 ? options_.edge_quadrature : 2 * k + 1;
  vol_rule_[static_cast<int>(Shape::Tri)] = quadrature_for(RefDomain::Tri, vdeg);
  vol_rule_[static_cast<int>(Shape::Quad)] = quadrature_for(RefDomain::Quad, vdeg);
  edge_rule_ = quadrature_for(RefDomain::Edge, edeg);
  setup_roles_and_constraints();
  setup_elements();
}

void Model::setup_roles_and_constraints() {
  const int ne = static_cast<int>(mesh_.edges.size());
  const int k = options_.order;
  const DofMap& d = dofs();

  std::map<std::string, const BoundaryCondition*> bc_of;
  for (const BoundaryCondition& bc : spec_.bcs) {
    if (mesh_.edges_with_tag(bc.tag).empty())
      throw ConfigError("boundary condition references unknown tag '" + bc.tag + "'");
    if (!bc_of.emplace(bc.tag, &bc).second)
      throw ConfigError("more than one boundary condition on tag '" + bc.tag + "'");
  }

  std::map<int, double> fixed;
  auto fix = [&](int dof, double value) {
    auto [it, inserted] = fixed.emplace(dof, value);
    if (!inserted && !same_value(it->second, value))
      throw ConfigError("conflicting essential conditions on a shared DOF");
  };
  auto edge_u_dofs = [&](int e, int comp, auto&& f) {
    const Edge& ed = mesh_.edges[e];
    for (int v : ed.v) f(d.u_vertex(v, comp));
    for (int j = 0; j + 1 < k; ++j) f(d.edge_u_base[e] + 3 * j + comp);
  };

  edge_role_.assign(ne, EdgeRole::Free);
  edge_moment_.assign(ne, 0.0);
  mirror_axis_.assign(ne, -1);
  for (int e = 0; e < ne; ++e) {
    const Edge& ed = mesh_.edges[e];
    if (ed.kind == EdgeKind::Interior) {
      edge_role_[e] = EdgeRole::Interior;
      continue;
    }
    if (ed.kind == EdgeKind::Branch) {
      edge_role_[e] = EdgeRole::Branch;
      continue;
    }
    auto it = bc_of.find(ed.tag);
    if (it == bc_of.end()) continue;
    const BoundaryCondition& bc = *it->second;
    switch (bc.type) {
      case BcType::Free:
        break;
      case BcType::Clamped:
        edge_role_[e] = EdgeRole::Clamped;
        for (int c = 0; c < 3; ++c) edge_u_dofs(e, c, [&](int dof) { fix(dof, 0.0); });
        for (int j = 0; j < k; ++j) fix(d.alpha(e, j), 0.0);
        break;
      case BcType::Symmetry: {
        int axis = -1;
        for (int c = 0; c < 3; ++c)
          if (std::abs(std::abs(bc.value[c]) - 1.0) < 1e-12) axis = c;
        for (int c = 0; c < 3; ++c)
          if (c != axis && std::abs(bc.value[c]) > 1e-12) axis = -2;
        if (axis < 0) throw ConfigError("symmetry normal must be a unit coordinate axis");
        edge_role_[e] = EdgeRole::Symmetry;
        mirror_axis_[e] = axis;
        edge_u_dofs(e, axis, [&](int dof) { fix(dof, 0.0); });
        for (int j = 0; j < k; ++j) fix(d.alpha(e, j), 0.0);
        break;
      }
      case BcType::PrescribedDisplacement:
        edge_role_[e] = EdgeRole::Prescribed;
        for (int c = 0; c < 3; ++c) edge_u_dofs(e, c, [&](int dof) { fix(dof, bc.value[c]); });
        break;
      case BcType::PrescribedMoment:
        edge_role_[e] = EdgeRole::Moment;
        edge_moment_[e] = bc.moment;
        break;
    }
  }

  for (const PointConstraint& pc : spec_.point_constraints) {
    const int v = probe_vertex(pc.probe);
    for (int c = 0; c < 3; ++c)
      if (pc.fixed[c]) fix(d.u_vertex(v, c), 0.0);
  }

  dirichlet_.assign(fixed.begin(), fixed.end());
  free_index_.assign(d.n_retained, -1);
  n_free_ = 0;
  for (int i = 0; i < d.n_retained; ++i)
    if (!fixed.count(i)) free_index_[i] = n_free_++;

  for (const EdgeTraction& tr : spec_.loads.edge)
    if (mesh_.edges_with_tag(tr.tag).empty()) throw ConfigError("edge load references unknown tag '" + tr.tag + "'");
  point_loads_.clear();
  for (const PointLoad& pl : spec_.loads.point) point_loads_.emplace_back(probe_vertex(pl.probe), pl.force);
}

Model::EdgePoint Model::make_edge_point(int t, int le, int q, bool same) const {
  const Element& el = mesh_.elements[t];
  const int nv = vertex_count(el.shape);
  Vec3d X[4];
  for (int i = 0; i < nv; ++i) X[i] = mesh_.vertices[el.v[i]];
  const auto ends = el.local_edge(le);
  const Vec3d xa = mesh_.vertices[ends[0]], xb = mesh_.vertices[ends[1]];
  const double s = edge_rule_.points[q][0];
  const auto xi = reference_edge_point(el.shape, le, s);
  const GeometryFrame g = geometry_frame(el.shape, X, xi);

  EdgePoint ep;
  ep.wt = edge_rule_.weights[q] * norm(xb - xa);
  ep.e = g.frame;
  ep.nu = g.normal;
  ep.x = g.position;
  ep.tau = normalized(xb - xa);
  ep.mu = normalized(cross(ep.tau, g.normal));
  for (int a = 0; a < 2; ++a)
    for (int kk = 0; kk < 2; ++kk) ep.gf[a][kk] = dot(g.dual[kk], g.frame[a]);
  for (int a = 0; a < 2; ++a) ep.tau_f[a] = dot(ep.tau, g.frame[a]);
  const double m1 = dot(ep.mu, g.frame[0]), m2 = dot(ep.mu, g.frame[1]);
  ep.mu_w[0] = m1 * m1;
  ep.mu_w[1] = m1 * m2;
  ep.mu_w[2] = m2 * m2;

  const LagrangeBasis& lb = spaces_.basis(el.shape);
  ep.phi.resize(lb.size());
  ep.d1.resize(lb.size());
  lb.eval(xi, ep.phi.data(), ep.d1.data());
  const MomentBasis& mb = spaces_.moments(el.shape);
  std::vector<std::array<double, 3>> sb(mb.size());
  mb.eval(xi, g, sb.data());
  ep.sig.resize(3, mb.size());
  ep.sig_mm.resize(mb.size());
  for (int d = 0; d < mb.size(); ++d) {
    for (int j = 0; j < 3; ++j) ep.sig(j, d) = sb[d][j];
    ep.sig_mm[d] = ep.mu_w[0] * sb[d][0] + ep.mu_w[1] * sb[d][1] + ep.mu_w[2] * sb[d][2];
  }
  const int nq = static_cast<int>(edge_rule_.size());
  ep.gq = same ? q : nq - 1 - q;
  ep.leg.resize(options_.order);
  legendre_values(options_.order, same ? s : 1.0 - s, ep.leg.data());
  return ep;
}

void Model::setup_elements() {
  const int k = options_.order;
  const int nel = static_cast<int>(mesh_.elements.size());
  const int nq = static_cast<int>(edge_rule_.size());
  elem_.assign(nel, {});
  for (int t = 0; t < nel; ++t) {
    const Element& el = mesh_.elements[t];
    const ElementDofs& ed = dofs().elements[t];
    const LagrangeBasis& lb = spaces_.basis(el.shape);
    const PolySpace& ps = spaces_.tensor_poly(el.shape);
    ElementData& D = elem_[t];
    D.shape = el.shape;
    D.n_nodes = lb.size();
    D.volume_bending = !(el.shape == Shape::Tri && k == 1);
    const int nb = lb.boundary_size();
    D.uidx.resize(3 * D.n_nodes);
    for (int n = 0; n < D.n_nodes; ++n)
      for (int c = 0; c < 3; ++c)
        D.uidx[3 * n + c] = n < nb ? 3 * n + c : ed.u_interior_begin() + 3 * (n - nb) + c;
    for (const AreaLoad& al : spec_.loads.area)
      if (al.element_tag.empty() || al.element_tag == el.tag) D.area_load += al.force_per_area;

    const int nv = vertex_count(el.shape);
    Vec3d X[4];
    for (int i = 0; i < nv; ++i) X[i] = mesh_.vertices[el.v[i]];
    const QuadratureRule& rule = vol_rule_[static_cast<int>(el.shape)];
    D.vol.resize(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const GeometryFrame g = geometry_frame(el.shape, X, rule.points[q]);
      VolumePoint& vp = D.vol[q];
      vp.wt = rule.weights[q] * g.weight;
      vp.e = g.frame;
      vp.nu = g.normal;
      for (int a = 0; a < 2; ++a)
        for (int kk = 0; kk < 2; ++kk) vp.gf[a][kk] = dot(g.dual[kk], g.frame[a]);
      for (int kk = 0; kk < 2; ++kk) vp.gam[kk] = dot(g.dual[kk], g.d12);
      vp.W[0] = dot(g.frame[0], g.weingarten * g.frame[0]);
      vp.W[1] = dot(g.frame[0], g.weingarten * g.frame[1]);
      vp.W[2] = dot(g.frame[1], g.weingarten * g.frame[1]);
      vp.phi.resize(D.n_nodes);
      vp.d1.resize(D.n_nodes);
      vp.d2.resize(D.n_nodes);
      lb.eval(rule.points[q], vp.phi.data(), vp.d1.data(), vp.d2.data());
      vp.psi.resize(ps.size());
      ps.eval(rule.points[q], vp.psi.data());
      const MomentBasis& mb = spaces_.moments(el.shape);
      std::vector<std::array<double, 3>> sb(mb.size());
      mb.eval(rule.points[q], g, sb.data());
      vp.sig.resize(3, mb.size());
      for (int d = 0; d < mb.size(); ++d)
        for (int j = 0; j < 3; ++j) vp.sig(j, d) = sb[d][j];
    }

    D.edges.resize(el.local_edge_count());
    for (int le = 0; le < el.local_edge_count(); ++le) {
      LocalEdge& L = D.edges[le];
      L.edge = mesh_.element_edges[t][le];
      const Edge& edge = mesh_.edges[L.edge];
      for (const Incidence& in : edge.inc)
        if (in.element == t && in.local_edge == le) {
          L.same = in.same_direction;
          L.sign = in.sign;
        }
      L.role = edge_role_[L.edge];
      L.moment = edge_moment_[L.edge];
      if (edge.kind == EdgeKind::Boundary)
        for (const EdgeTraction& tr : spec_.loads.edge)
          if (tr.tag == edge.tag) L.traction += tr.force_per_length;
      for (int q = 0; q < nq; ++q) L.pts.push_back(make_edge_point(t, le, q, L.same));
    }
  }

  // Reference averaged normals, then the reference angles against them.
  ref_normals_.assign(mesh_.edges.size(), std::vector<Vec3d>(nq, Vec3d{0, 0, 0}));
  for (const ElementData& D : elem_)
    for (const LocalEdge& L : D.edges)
      for (const EdgePoint& ep : L.pts) ref_normals_[L.edge][ep.gq] += ep.nu;
  for (std::size_t e = 0; e < ref_normals_.size(); ++e)
    for (Vec3d& n : ref_normals_[e]) {
      mirror_average(static_cast<int>(e), n);
      if (!(norm(n) > 1e-12)) throw GeometryError("averaged reference normal vanishes at an edge");
      n = normalized(n);
    }
  for (ElementData& D : elem_)
    for (LocalEdge& L : D.edges)
      for (EdgePoint& ep : L.pts) {
        ep.nref_mu = dot(ref_normals_[L.edge][ep.gq], ep.mu);
        ep.theta_ref = checked_acos(ep.nref_mu);
      }
}

State Model::initial_state() const {
  State s;
  s.retained = Eigen::VectorXd::Zero(dofs().n_retained);
  s.condensed.resize(mesh_.elements.size());
  for (std::size_t t = 0; t < mesh_.elements.size(); ++t)
    s.condensed[t] = Eigen::VectorXd::Zero(dofs().elements[t].n_condensed());
  s.lagged = ref_normals_;
  s.lambda = 0.0;
  return s;
}

void Model::apply_dirichlet(State& s, double lambda) const {
  for (const auto& [dof, value] : dirichlet_) s.retained[dof] = lambda * value;
}

Eigen::VectorXd Model::gather(const State& s, int t) const {
  const ElementDofs& ed = dofs().elements[t];
  Eigen::VectorXd z(ed.n_local());
  for (int i = 0; i < ed.n_retained(); ++i) z[i] = s.retained[ed.retained[i]];
  z.tail(ed.n_condensed()) = s.condensed[t];
  return z;
}

void Model::scatter(State& s, int t, const Eigen::VectorXd& z) const {
  const ElementDofs& ed = dofs().elements[t];
  for (int i = 0; i < ed.n_retained(); ++i) s.retained[ed.retained[i]] = z[i];
  s.condensed[t] = z.tail(ed.n_condensed());
}

void Model::element_eval(int t, const Eigen::VectorXd& z, const std::vector<std::vector<Vec3d>>& lagged,
                         double lambda, bool hessian, ElementEval& out) const {
  const ElementData& D = elem_[t];
  const ElementDofs& ed = dofs().elements[t];
  const int n = ed.n_local();
  const int nn = D.n_nodes;
  const int k = options_.order;
  const int np = spaces_.tensor_poly(D.shape).size();
  const int ns = ed.n_sigma;
  const int sb = ed.sigma_begin(), rb = ed.aux_begin(), ab = ed.alpha_begin();
  const double th = material_.t;
  const double cs = 6.0 / (th * th * th);
  const double cr = 1.0 / (2.0 * th);

  out.energy = {};
  out.g.setZero(n);
  if (hessian) out.H.setZero(n, n);

  std::vector<Vec3d> un(nn);
  for (int a = 0; a < nn; ++a)
    for (int c = 0; c < 3; ++c) un[a][c] = z[D.uidx[3 * a + c]];
  const Eigen::VectorXd zs = z.segment(sb, ns);

  // The auxiliary membrane field must see the exact inverse of M so that
  // eliminating it leaves the projected membrane energy; the moment term
  // keeps the configured inverse form.
  Material aux_material = material_;
  aux_material.minv = MinvForm::AlgebraicDual;
  auto hessian_of = [](const Material& mat) {
    Eigen::Matrix3d H3;
    double q[3][3];
    const double zero3[3] = {0, 0, 0};
    norm_Minv_coeffs_derivatives(zero3, mat, nullptr, q);
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) H3(j, l) = q[j][l];
    return H3;
  };
  const Eigen::Matrix3d Q = hessian_of(material_), QR = hessian_of(aux_material);
  // Auxiliary membrane field: frame component j times psi_m.
  Eigen::Matrix<double, 3, Eigen::Dynamic> Ra(3, 3 * np);

  Eigen::MatrixXd Bn(nn, 5);
  Eigen::Matrix<double, 15, 15> Hq;
  Eigen::Matrix<double, 15, 1> gq;
  Eigen::Matrix<double, 15, 3> Mx, MxR;

  // Pull pointwise derivatives with respect to the kernel variables back to
  // nodal displacement DOFs. `ncol` is 2 (first derivatives only) or 5 (with
  // second derivatives). Mixed terms M (kernel variable x frame coefficient)
  // couple to field DOFs through the coefficient matrix C (3 x ndof).
  auto scatter_u = [&](int ncol) {
    const auto B = Bn.leftCols(ncol);
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd gi(ncol);
      for (int c = 0; c < ncol; ++c) gi[c] = gq(kVarOf[i][c]);
      const Eigen::VectorXd gn = B * gi;
      for (int a = 0; a < nn; ++a) out.g[D.uidx[3 * a + i]] += gn[a];
    }
    if (!hessian) return;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Eigen::MatrixXd Hs(ncol, ncol);
        for (int c = 0; c < ncol; ++c)
          for (int e = 0; e < ncol; ++e) Hs(c, e) = Hq(kVarOf[i][c], kVarOf[j][e]);
        const Eigen::MatrixXd Hij = B * Hs * B.transpose();
        for (int a = 0; a < nn; ++a)
          for (int b = 0; b < nn; ++b) out.H(D.uidx[3 * a + i], D.uidx[3 * b + j]) += Hij(a, b);
      }
  };
  auto mixed = [&](int ncol, const Eigen::Matrix<double, 15, 3>& M, int begin,
                   const Eigen::Matrix<double, 3, Eigen::Dynamic>& C) {
    if (!hessian) return;
    for (int i = 0; i < 3; ++i) {
      Eigen::MatrixXd Mi(ncol, 3);
      for (int c = 0; c < ncol; ++c) Mi.row(c) = M.row(kVarOf[i][c]);
      const Eigen::MatrixXd T = Bn.leftCols(ncol) * Mi * C;  // nn x ndof
      for (int a = 0; a < nn; ++a) {
        const int r = D.uidx[3 * a + i];
        for (int d = 0; d < T.cols(); ++d) {
          out.H(r, begin + d) += T(a, d);
          out.H(begin + d, r) += T(a, d);
        }
      }
    }
  };

  // ------------------------------------------------------------ element volume
  for (const VolumePoint& vp : D.vol) {
    const double wt = vp.wt;
    for (int a = 0; a < nn; ++a) {
      Bn(a, 0) = vp.d1[a][0];
      Bn(a, 1) = vp.d1[a][1];
      Bn(a, 2) = vp.d2[a][0];
      Bn(a, 3) = vp.d2[a][1];
      Bn(a, 4) = vp.d2[a][2];
    }
    double p[15] = {};
    for (int a = 0; a < nn; ++a)
      for (int i = 0; i < 3; ++i) {
        p[2 * i] += un[a][i] * vp.d1[a][0];
        p[2 * i + 1] += un[a][i] * vp.d1[a][1];
        for (int cd = 0; cd < 3; ++cd) p[6 + 3 * i + cd] += un[a][i] * vp.d2[a][cd];
      }
    const Eigen::Vector3d Sc = vp.sig * zs;

    Hq.setZero();
    gq.setZero();
    Mx.setZero();
    MxR.setZero();

    J6 pj[6];
    for (int v = 0; v < 6; ++v) pj[v] = J6::variable(p[v], v);
    const auto fe = frame_images<J6>(vp.e, vp.gf, pj);
    const J6 E[3] = {0.5 * (dot(fe[0], fe[0]) - 1.0), 0.5 * dot(fe[0], fe[1]), 0.5 * (dot(fe[1], fe[1]) - 1.0)};

    if (!locking_) {
      const J6 m = (0.5 * th) * norm_M_frame(E[0], E[1], E[2], material_);
      out.energy.membrane += wt * m.val;
      add_jet(m, wt, gq, Hq);
    } else {
      Ra.setZero();
      for (int j = 0; j < 3; ++j)
        for (int m = 0; m < np; ++m) Ra(j, j * np + m) = vp.psi[m];
      const Eigen::Vector3d Rc = Ra * z.segment(rb, 3 * np);
      double gR[3];
      norm_Minv_coeffs_derivatives(Rc.data(), aux_material, gR, nullptr);
      out.energy.locking_aux += -wt * cr * norm_Minv_coeffs(Rc.data(), aux_material);
      Eigen::Vector3d dR;
      for (int j = 0; j < 3; ++j) {
        out.energy.membrane += wt * Rc[j] * E[j].val;
        add_jet(E[j], wt * Rc[j], gq, Hq);
        for (int v = 0; v < 6; ++v) MxR(v, j) += wt * E[j].g[v];
        dR[j] = wt * (-cr * gR[j] + E[j].val);
      }
      out.g.segment(rb, 3 * np) += Ra.transpose() * dR;
      if (hessian) out.H.block(rb, rb, 3 * np, 3 * np) += (-wt * cr) * Ra.transpose() * QR * Ra;
      mixed(2, MxR, rb, Ra);
    }

    if (D.volume_bending) {
      const Vec3<J6> nh6 = unit_normal(fe, t);
      J15 pr[15];
      for (int v = 0; v < 15; ++v) pr[v] = J15::variable(p[v], v);
      const J15 nh[3] = {embed(nh6[0]), embed(nh6[1]), embed(nh6[2])};
      J15 tw[3];
      for (int i = 0; i < 3; ++i) tw[i] = pr[6 + 3 * i + 1] - vp.gam[0] * pr[2 * i] - vp.gam[1] * pr[2 * i + 1];
      const J15 shift = 1.0 - (vp.nu[0] * nh[0] + vp.nu[1] * nh[1] + vp.nu[2] * nh[2]);
      constexpr int kPair[3][2] = {{0, 0}, {0, 1}, {1, 1}};
      Eigen::Vector3d dS;
      for (int j = 0; j < 3; ++j) {
        const int a = kPair[j][0], b = kPair[j][1];
        const double A = vp.gf[a][0] * vp.gf[b][0];
        const double Bc = vp.gf[a][0] * vp.gf[b][1] + vp.gf[a][1] * vp.gf[b][0];
        const double C = vp.gf[a][1] * vp.gf[b][1];
        J15 K = shift * vp.W[j];
        for (int i = 0; i < 3; ++i) K += nh[i] * (A * pr[6 + 3 * i] + Bc * tw[i] + C * pr[6 + 3 * i + 2]);
        out.energy.bending_coupling += wt * Sc[j] * K.val;
        add_jet(K, -wt * Sc[j], gq, Hq);
        for (int v = 0; v < 15; ++v) Mx(v, j) = -wt * K.g[v];
        dS[j] = -wt * K.val;
      }
      out.g.segment(sb, ns) += vp.sig.transpose() * dS;
      mixed(5, Mx, sb, vp.sig);
    }

    {
      double gS[3];
      norm_Minv_coeffs_derivatives(Sc.data(), material_, gS, nullptr);
      out.energy.moment_quadratic += -wt * cs * norm_Minv_coeffs(Sc.data(), material_);
      out.g.segment(sb, ns) += (-wt * cs) * vp.sig.transpose() * Eigen::Vector3d(gS[0], gS[1], gS[2]);
      if (hessian) out.H.block(sb, sb, ns, ns) += (-wt * cs) * vp.sig.transpose() * Q * vp.sig;
    }

    if (lambda != 0.0 && norm(D.area_load) > 0.0) {
      for (int a = 0; a < nn; ++a)
        for (int c = 0; c < 3; ++c) {
          const double f = lambda * wt * D.area_load[c] * vp.phi[a];
          out.energy.external_work += f * un[a][c];
          out.g[D.uidx[3 * a + c]] -= f;
        }
    }

    scatter_u(D.volume_bending ? 5 : 2);
  }

  // -------------------------------------------------------- element boundary
  for (int le = 0; le < static_cast<int>(D.edges.size()); ++le) {
    const LocalEdge& L = D.edges[le];
    const double s = static_cast<double>(L.sign);
    const int a0 = ab + le * k;
    for (const EdgePoint& ep : L.pts) {
      const double wt = ep.wt;
      for (int a = 0; a < nn; ++a) {
        Bn(a, 0) = ep.d1[a][0];
        Bn(a, 1) = ep.d1[a][1];
      }
      double p[6] = {};
      for (int a = 0; a < nn; ++a)
        for (int i = 0; i < 3; ++i) {
          p[2 * i] += un[a][i] * ep.d1[a][0];
          p[2 * i + 1] += un[a][i] * ep.d1[a][1];
        }
      const double smm = ep.sig_mm.dot(zs);
      double alpha = 0.0;
      for (int j = 0; j < k; ++j) alpha += z[a0 + j] * ep.leg[j];

      J6 pj[6];
      for (int v = 0; v < 6; ++v) pj[v] = J6::variable(p[v], v);
      const auto fe = frame_images<J6>(ep.e, ep.gf, pj);
      const Vec3<J6> nh = unit_normal(fe, t);
      const Vec3<J6> ft = ep.tau_f[0] * fe[0] + ep.tau_f[1] * fe[1];
      const J6 jb = sqrt(dot(ft, ft));
      if (!(jb.val > kDegenerateJ)) throw DegenerateDeformation("deformation collapses an edge (J_b <= tol)", t);
      const J6 ijb = inverse(jb);
      const Vec3<J6> tu{ft[0] * ijb, ft[1] * ijb, ft[2] * ijb};
      const Vec3<J6> mh = cross(tu, nh);
      const Vec3d& N = lagged[L.edge][ep.gq];
      const J6 nt = N[0] * tu[0] + N[1] * tu[1] + N[2] * tu[2];
      const J6 den2 = 1.0 - nt * nt;
      if (!(den2.val > kProjectionTolerance * kProjectionTolerance))
        throw ProjectionDegenerate("lagged normal nearly parallel to the deformed edge tangent");
      const J6 cosang = (N[0] * mh[0] + N[1] * mh[1] + N[2] * mh[2]) / sqrt(den2);
      const J6 dth =
          options_.angle == AngleMode::Exact ? ep.theta_ref - checked_acos_t(cosang) : cosang - ep.nref_mu;
      const double f = dth.val - s * alpha;

      out.energy.bending_coupling -= wt * f * smm;
      Hq.setZero();
      gq.setZero();
      Mx.setZero();
      add_jet(dth, wt * smm, gq, Hq);
      for (int v = 0; v < 6; ++v) Mx(v, 0) = wt * dth.g[v];
      out.g.segment(sb, ns) += (wt * f) * ep.sig_mm.transpose();
      for (int j = 0; j < k; ++j) out.g[a0 + j] += -wt * s * ep.leg[j] * smm;
      if (hessian)
        for (int j = 0; j < k; ++j)
          for (int d = 0; d < ns; ++d) {
            const double v = -wt * s * ep.leg[j] * ep.sig_mm[d];
            out.H(a0 + j, sb + d) += v;
            out.H(sb + d, a0 + j) += v;
          }

      if (L.role == EdgeRole::Moment && lambda != 0.0) {
        const double lm = lambda * L.moment * s * wt;
        out.energy.external_work += lm * alpha;
        for (int j = 0; j < k; ++j) out.g[a0 + j] -= lm * ep.leg[j];
      }
      if (lambda != 0.0 && norm(L.traction) > 0.0) {
        for (int a = 0; a < nn; ++a)
          for (int c = 0; c < 3; ++c) {
            const double fl = lambda * wt * L.traction[c] * ep.phi[a];
            out.energy.external_work += fl * un[a][c];
            out.g[D.uidx[3 * a + c]] -= fl;
          }
      }
      scatter_u(2);
      Eigen::Matrix<double, 3, Eigen::Dynamic> C = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, ns);
      C.row(0) = ep.sig_mm;
      mixed(2, Mx, sb, C);
    }
  }
}

EnergyBreakdown Model::lagrangian(const State& s) const {
  EnergyBreakdown total;
  ElementEval ev;
  for (int t = 0; t < static_cast<int>(mesh_.elements.size()); ++t) {
    element_eval(t, gather(s, t), s.lagged, s.lambda, false, ev);
    total += ev.energy;
  }
  for (const auto& [v, f] : point_loads_) total.external_work += s.lambda * dot(f, vertex_displacement(s, v));
  return total;
}

void Model::gradient(const State& s, Eigen::VectorXd& g_ret, std::vector<Eigen::VectorXd>& g_cond) const {
  g_ret = Eigen::VectorXd::Zero(dofs().n_retained);
  g_cond.resize(mesh_.elements.size());
  ElementEval ev;
  for (int t = 0; t < static_cast<int>(mesh_.elements.size()); ++t) {
    const ElementDofs& ed = dofs().elements[t];
    element_eval(t, gather(s, t), s.lagged, s.lambda, false, ev);
    for (int i = 0; i < ed.n_retained(); ++i) g_ret[ed.retained[i]] += ev.g[i];
    g_cond[t] = ev.g.tail(ed.n_condensed());
  }
  for (const auto& [v, f] : point_loads_)
    for (int c = 0; c < 3; ++c) g_ret[dofs().u_vertex(v, c)] -= s.lambda * f[c];
}

void CondensationBlock::factor(const Eigen::MatrixXd& Hcc) {
  d.resize(Hcc.rows());
  for (int i = 0; i < d.size(); ++i) {
    const double a = std::abs(Hcc(i, i));
    d[i] = a > 0.0 ? 1.0 / std::sqrt(a) : 1.0;
  }
  lu.compute(d.asDiagonal() * Hcc * d.asDiagonal());
}

Eigen::MatrixXd CondensationBlock::solve(const Eigen::MatrixXd& rhs) const {
  return d.asDiagonal() * lu.solve(d.asDiagonal() * rhs);
}

AssembledSystem Model::assemble(const State& s, bool hessian) const {
  const int nel = static_cast<int>(mesh_.elements.size());
  AssembledSystem sys;
  sys.blocks.resize(nel);
  sys.residual = Eigen::VectorXd::Zero(n_free_);
  Eigen::VectorXd gfull = Eigen::VectorXd::Zero(dofs().n_retained);
  double cond_sq = 0.0;
  std::vector<Eigen::Triplet<double>> trip;
  ElementEval ev;
  for (int t = 0; t < nel; ++t) {
    const ElementDofs& ed = dofs().elements[t];
    const int nr = ed.n_retained(), nc = ed.n_condensed();
    element_eval(t, gather(s, t), s.lagged, s.lambda, true, ev);
    sys.energy += ev.energy;
    const Eigen::VectorXd gr = ev.g.head(nr), gc = ev.g.tail(nc);
    CondensationBlock& blk = sys.blocks[t];
    blk.factor(ev.H.bottomRightCorner(nc, nc));
    blk.Hcr = ev.H.bottomLeftCorner(nc, nr);
    blk.gc = gc;
    const Eigen::MatrixXd X = blk.solve(blk.Hcr);
    const Eigen::VectorXd y = blk.solve(gc);
    const Eigen::VectorXd fel = gr - ev.H.topRightCorner(nr, nc) * y;
    for (int i = 0; i < nr; ++i) {
      gfull[ed.retained[i]] += gr[i];
      const int fi = free_index_[ed.retained[i]];
      if (fi >= 0) sys.residual[fi] += fel[i];
    }
    cond_sq += gc.squaredNorm();
    if (hessian) {
      Eigen::MatrixXd Kel = ev.H.topLeftCorner(nr, nr) - ev.H.topRightCorner(nr, nc) * X;
      // The exact Schur complement is symmetric; drop the roundoff part.
      Kel = 0.5 * (Kel + Kel.transpose()).eval();
      for (int i = 0; i < nr; ++i) {
        const int fi = free_index_[ed.retained[i]];
        if (fi < 0) continue;
        for (int j = 0; j < nr; ++j) {
          const int fj = free_index_[ed.retained[j]];
          if (fj >= 0 && Kel(i, j) != 0.0) trip.emplace_back(fi, fj, Kel(i, j));
        }
      }
    }
  }
  for (const auto& [v, f] : point_loads_) {
    sys.energy.external_work += s.lambda * dot(f, vertex_displacement(s, v));
    for (int c = 0; c < 3; ++c) {
      const int dof = dofs().u_vertex(v, c);
      gfull[dof] -= s.lambda * f[c];
      if (free_index_[dof] >= 0) sys.residual[free_index_[dof]] -= s.lambda * f[c];
    }
  }
  double sq = cond_sq;
  for (int i = 0; i < dofs().n_retained; ++i)
    if (free_index_[i] >= 0) sq += gfull[i] * gfull[i];
  sys.gradient_norm = std::sqrt(sq);
  if (hessian) {
    sys.K.resize(n_free_, n_free_);
    sys.K.setFromTriplets(trip.begin(), trip.end());
  }
  return sys;
}

void Model::assemble_full(const State& s, Eigen::SparseMatrix<double>& K, Eigen::VectorXd& g) const {
  const int nel = static_cast<int>(mesh_.elements.size());
  std::vector<int> cond_base(nel);
  int n = n_free_;
  for (int t = 0; t < nel; ++t) {
    cond_base[t] = n;
    n += dofs().elements[t].n_condensed();
  }
  g = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  ElementEval ev;
  for (int t = 0; t < nel; ++t) {
    const ElementDofs& ed = dofs().elements[t];
    element_eval(t, gather(s, t), s.lagged, s.lambda, true, ev);
    std::vector<int> map(ed.n_local());
    for (int i = 0; i < ed.n_retained(); ++i) map[i] = free_index_[ed.retained[i]];
    for (int i = 0; i < ed.n_condensed(); ++i) map[ed.n_retained() + i] = cond_base[t] + i;
    for (int i = 0; i < ed.n_local(); ++i) {
      if (map[i] < 0) continue;
      g[map[i]] += ev.g[i];
      for (int j = 0; j < ed.n_local(); ++j)
        if (map[j] >= 0 && ev.H(i, j) != 0.0) trip.emplace_back(map[i], map[j], ev.H(i, j));
    }
  }
  for (const auto& [v, f] : point_loads_)
    for (int c = 0; c < 3; ++c) {
      const int fi = free_index_[dofs().u_vertex(v, c)];
      if (fi >= 0) g[fi] -= s.lambda * f[c];
    }
  K.resize(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
}

void Model::recover_condensed(const AssembledSystem& sys, const Eigen::VectorXd& dr,
                              std::vector<Eigen::VectorXd>& dc) const {
  const int nel = static_cast<int>(mesh_.elements.size());
  dc.resize(nel);
  for (int t = 0; t < nel; ++t) {
    const ElementDofs& ed = dofs().elements[t];
    Eigen::VectorXd drl(ed.n_retained());
    for (int i = 0; i < ed.n_retained(); ++i) drl[i] = dr[ed.retained[i]];
    const CondensationBlock& blk = sys.blocks[t];
    dc[t] = -blk.solve(blk.gc + blk.Hcr * drl);
  }
}

std::vector<std::vector<Vec3d>> Model::averaged_normals(const State& s) const {
  const int nq = static_cast<int>(edge_rule_.size());
  std::vector<std::vector<Vec3d>> out(mesh_.edges.size(), std::vector<Vec3d>(nq, Vec3d{0, 0, 0}));
  for (int t = 0; t < static_cast<int>(elem_.size()); ++t) {
    const ElementData& D = elem_[t];
    const ElementDofs& ed = dofs().elements[t];
    std::vector<Vec3d> un(D.n_nodes);
    for (int a = 0; a < D.n_nodes; ++a)
      for (int c = 0; c < 3; ++c) {
        const int li = D.uidx[3 * a + c];
        un[a][c] = li < ed.n_retained() ? s.retained[ed.retained[li]] : s.condensed[t][li - ed.n_retained()];
      }
    for (const LocalEdge& L : D.edges)
      for (const EdgePoint& ep : L.pts) {
        double p[6] = {};
        for (int a = 0; a < D.n_nodes; ++a)
          for (int i = 0; i < 3; ++i) {
            p[2 * i] += un[a][i] * ep.d1[a][0];
            p[2 * i + 1] += un[a][i] * ep.d1[a][1];
          }
        const auto fe = frame_images<double>(ep.e, ep.gf, p);
        const Vec3d c = cross(fe[0], fe[1]);
        const double J = norm(c);
        if (!(J > kDegenerateJ)) throw DegenerateDeformation("deformation collapses the element (J <= tol)", t);
        out[L.edge][ep.gq] += c / J;
      }
  }
  for (std::size_t e = 0; e < out.size(); ++e)
    for (Vec3d& v : out[e]) {
      mirror_average(static_cast<int>(e), v);
      if (!(norm(v) > 1e-12)) throw GeometryError("averaged deformed normal vanishes at an edge");
      v = normalized(v);
    }
  return out;
}

void Model::mirror_average(int e, Vec3d& n) const {
  // A symmetry edge averages with the mirrored element, whose normal differs
  // only in the sign of the component along the plane normal.
  if (mirror_axis_[e] >= 0) n[mirror_axis_[e]] = 0.0;
}

void Model::update_lagged(State& s) const {
  const auto avg = averaged_normals(s);
  for (std::size_t e = 0; e < mesh_.edges.size(); ++e)
    if (edge_role_[e] != EdgeRole::Clamped) s.lagged[e] = avg[e];
}

Vec3d Model::vertex_displacement(const State& s, int v) const {
  return {s.retained[dofs().u_vertex(v, 0)], s.retained[dofs().u_vertex(v, 1)], s.retained[dofs().u_vertex(v, 2)]};
}

int Model::probe_vertex(const std::string& name) const {
  auto it = mesh_.probes.find(name);
  if (it == mesh_.probes.end()) throw ConfigError("unknown probe '" + name + "'");
  return mesh_.nearest_vertex(it->second);
}

Mat3d Model::green_strain_at(const State& s, int t, const std::array<double, 2>& xi) const {
  const ElementData& D = elem_[t];
  const ElementDofs& ed = dofs().elements[t];
  const GeometryFrame g = geometry_frame(mesh_, t, xi);
  std::vector<double> phi(D.n_nodes);
  std::vector<std::array<double, 2>> d1(D.n_nodes);
  spaces_.basis(D.shape).eval(xi, phi.data(), d1.data());
  Mat3d gu{};
  for (int a = 0; a < D.n_nodes; ++a) {
    Vec3d u;
    for (int c = 0; c < 3; ++c) {
      const int li = D.uidx[3 * a + c];
      u[c] = li < ed.n_retained() ? s.retained[ed.retained[li]] : s.condensed[t][li - ed.n_retained()];
    }
    gu = gu + outer(u, d1[a][0] * g.dual[0] + d1[a][1] * g.dual[1]);
  }
  return green_strain(deformation_gradient(g, gu), g.projector);
}

Mat3d Model::membrane_stress_at(const State& s, int t, const std::array<double, 2>& xi) const {
  const GeometryFrame g = geometry_frame(mesh_, t, xi);
  return membrane_stress(green_strain_at(s, t, xi), g.projector, material_);
}

Mat3d Model::projected_membrane_stress_at(const State& s, int t, const std::array<double, 2>& xi) const {
  if (!locking_) throw ConfigError("projected membrane stress needs the locking augmentation");
  const ElementDofs& ed = dofs().elements[t];
  const GeometryFrame g = geometry_frame(mesh_, t, xi);
  const PolySpace& ps = spaces_.tensor_poly(elem_[t].shape);
  const int np = ps.size();
  std::vector<double> psi(np);
  ps.eval(xi, psi.data());
  const int off = ed.aux_begin() - ed.n_retained();
  Mat3d r{};
  for (int j = 0; j < 3; ++j) {
    double c = 0.0;
    for (int m = 0; m < np; ++m) c += s.condensed[t][off + j * np + m] * psi[m];
    r = r + c * frame_tensor(g.frame, j);
  }
  return (1.0 / material_.t) * r;
}

Mat3d Model::membrane_stress_at_point(const State& s, const Vec3d& p, bool projected) const {
  Mat3d acc{};
  int count = 0;
  const double tol = 1e-8 * mesh_.characteristic_length();
  for (int t = 0; t < static_cast<int>(mesh_.elements.size()); ++t) {
    const auto xi = locate(mesh_, t, p, tol);
    if (!xi) continue;
    acc = acc + (projected && locking_ ? projected_membrane_stress_at(s, t, *xi) : membrane_stress_at(s, t, *xi));
    ++count;
  }
  if (count == 0) throw GeometryError("probe point does not lie on the mesh");
  return (1.0 / count) * acc;
}

Mat3d Model::moment_at(const State& s, int t, const std::array<double, 2>& xi) const {
  const ElementDofs& ed = dofs().elements[t];
  const GeometryFrame g = geometry_frame(mesh_, t, xi);
  const MomentBasis& mb = spaces_.moments(elem_[t].shape);
  std::vector<std::array<double, 3>> sbv(mb.size());
  mb.eval(xi, g, sbv.data());
  const int off = ed.sigma_begin() - ed.n_retained();
  double c[3] = {0, 0, 0};
  for (int d = 0; d < mb.size(); ++d)
    for (int j = 0; j < 3; ++j) c[j] += s.condensed[t][off + d] * sbv[d][j];
  Mat3d m{};
  for (int j = 0; j < 3; ++j) m = m + c[j] * frame_tensor(g.frame, j);
  return m;
}

double Model::max_moment_norm(const State& s, const std::string& tag) const {
  double best = 0.0;
  const QuadratureRule* rules = vol_rule_;
  for (int t = 0; t < static_cast<int>(mesh_.elements.size()); ++t) {
    if (mesh_.elements[t].tag != tag) continue;
    const QuadratureRule& r = rules[static_cast<int>(mesh_.elements[t].shape)];
    for (const auto& xi : r.points) best = std::max(best, std::sqrt(ddot(moment_at(s, t, xi), moment_at(s, t, xi))));
  }
  return best;
}

Model::EdgeSample Model::edge_sample(int t, int le, int q) const {
  const EdgePoint& ep = elem_[t].edges[le].pts[q];
  return {ep.x, ep.tau, ep.mu, ep.nu};
}

}  // namespace shell
