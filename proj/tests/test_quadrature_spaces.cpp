#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "shell/error.hpp"
#include "shell/generators.hpp"
#include "shell/quadrature.hpp"
#include "shell/spaces.hpp"

using namespace shell;

namespace {

double integrate(const QuadratureRule& r, int px, int py) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q][0], px) * std::pow(r.points[q][1], py);
  return s;
}

// int over the reference triangle of x^a y^b = a! b! / (a+b+2)!
double tri_moment(int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); }

SurfaceMesh single(Shape s) {
  if (s == Shape::Tri) return build_topology({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{Shape::Tri, {0, 1, 2}, ""}}, {});
  return build_topology({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{Shape::Quad, {0, 1, 2, 3}, ""}}, {});
}

}  // namespace

TEST(Quadrature, EdgeDegreeThreeIsTwoPointGauss) {
  const QuadratureRule r = quadrature_for(RefDomain::Edge, 3);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r.weights[0] + r.weights[1], 1.0, 1e-15);
  EXPECT_NEAR(r.points[0][0], 0.5 - 0.5 / std::sqrt(3.0), 1e-15);
}

TEST(Quadrature, QuadDegreeFourIntegratesX2Y2) {
  const QuadratureRule r = quadrature_for(RefDomain::Quad, 4);
  EXPECT_EQ(r.size(), 9u);
  EXPECT_NEAR(integrate(r, 2, 2), 1.0 / 9.0, 1e-15);
}

TEST(Quadrature, TriangleAreaIsOneHalf) {
  EXPECT_NEAR(integrate(quadrature_for(RefDomain::Tri, 2), 0, 0), 0.5, 1e-15);
}

TEST(Quadrature, ExactnessUpToTheRequestedDegree) {
  for (int d = 0; d <= 14; ++d) {
    const QuadratureRule t = quadrature_for(RefDomain::Tri, d);
    const QuadratureRule q = quadrature_for(RefDomain::Quad, d);
    const QuadratureRule e = quadrature_for(RefDomain::Edge, d);
    EXPECT_GE(t.degree, d);
    for (int a = 0; a <= d; ++a) {
      EXPECT_NEAR(integrate(e, a, 0), 1.0 / (a + 1), 1e-14) << "edge degree " << d;
      for (int b = 0; a + b <= d; ++b) EXPECT_NEAR(integrate(t, a, b), tri_moment(a, b), 1e-14) << d;
      for (int b = 0; b <= d; ++b) EXPECT_NEAR(integrate(q, a, b), 1.0 / ((a + 1) * (b + 1)), 1e-14) << d;
    }
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_TRUE(inside_reference(Shape::Tri, t.points[i]));
  }
}

TEST(Quadrature, RejectsNegativeDegree) { EXPECT_THROW(quadrature_for(RefDomain::Tri, -1), ConfigError); }

TEST(Lagrange, BarycenterOfLinearTriangle) {
  const LagrangeBasis b(Shape::Tri, 1);
  double v[3];
  b.eval({1.0 / 3.0, 1.0 / 3.0}, v);
  for (double x : v) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}

TEST(Lagrange, NodalAndPartitionOfUnity) {
  for (Shape s : {Shape::Tri, Shape::Quad})
    for (int k = 1; k <= 4; ++k) {
      const LagrangeBasis b(s, k);
      const int n = b.size();
      std::vector<double> v(n);
      std::vector<std::array<double, 2>> d1(n);
      for (int i = 0; i < n; ++i) {
        b.eval(b.nodes()[i], v.data());
        for (int j = 0; j < n; ++j) EXPECT_NEAR(v[j], i == j ? 1.0 : 0.0, 1e-11) << k;
      }
      b.eval({0.21, 0.37}, v.data(), d1.data());
      EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 1.0, 1e-12);
      double g0 = 0, g1 = 0;
      for (auto& g : d1) g0 += g[0], g1 += g[1];
      EXPECT_NEAR(g0, 0.0, 1e-10);
      EXPECT_NEAR(g1, 0.0, 1e-10);
    }
}

TEST(Lagrange, SecondDerivativesMatchFiniteDifferences) {
  const LagrangeBasis b(Shape::Quad, 3);
  const int n = b.size();
  std::vector<std::array<double, 2>> dp(n), dm(n), d1(n);
  std::vector<std::array<double, 3>> d2(n);
  std::vector<double> v(n);
  const double h = 1e-6;
  b.eval({0.4, 0.3}, v.data(), d1.data(), d2.data());
  b.eval({0.4 + h, 0.3}, v.data(), dp.data());
  b.eval({0.4 - h, 0.3}, v.data(), dm.data());
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(d2[i][0], (dp[i][0] - dm[i][0]) / (2 * h), 1e-6);
    EXPECT_NEAR(d2[i][1], (dp[i][1] - dm[i][1]) / (2 * h), 1e-6);
  }
}

TEST(Lagrange, OutsideReferenceThrows) {
  const LagrangeBasis b(Shape::Tri, 2);
  std::vector<double> v(b.size());
  EXPECT_THROW(eval_shape(b, {0.8, 0.8}, v.data()), GeometryError);
}

TEST(Spaces, RetainedCountsPerElement) {
  // Retained = displacement on element-boundary nodes plus edge rotations.
  const int expected[2][2] = {{12, 36}, {16, 48}};  // [tri, quad][k = 1, 3]
  for (Shape s : {Shape::Tri, Shape::Quad})
    for (int ki : {0, 1}) {
      const int k = ki == 0 ? 1 : 3;
      const Spaces sp = make_spaces(single(s), k, false);
      EXPECT_EQ(sp.dofs.elements[0].n_retained(), expected[static_cast<int>(s)][ki]) << shape_name(s) << " k=" << k;
    }
}

TEST(Spaces, MomentSpaceDimensions) {
  // Triangles: three frame components of P_{k-1}. Quads: the enriched
  // Q_{m+1,m} x Q_{m,m} x Q_{m,m+1} space, 5 functions at m = 0.
  EXPECT_EQ(make_spaces(single(Shape::Tri), 1, false).dofs.elements[0].n_sigma, 3);
  EXPECT_EQ(make_spaces(single(Shape::Quad), 1, false).dofs.elements[0].n_sigma, 5);
  EXPECT_EQ(make_spaces(single(Shape::Tri), 3, false).dofs.elements[0].n_sigma, 18);
  EXPECT_EQ(make_spaces(single(Shape::Quad), 3, false).dofs.elements[0].n_sigma, 2 * 12 + 9);
  const Spaces sp = make_spaces(single(Shape::Quad), 2, true);
  EXPECT_EQ(sp.dofs.elements[0].n_aux, 12);
  EXPECT_EQ(sp.membrane_aux.total, 12);
  EXPECT_TRUE(sp.moment.condensable);
}

TEST(Spaces, GlobalNumberingSharesEdgeDofs) {
  GenParams g;
  g.nx = 3;
  g.ny = 2;
  const SurfaceMesh m = gen_benchmark("flat_plate", g);
  const int k = 3;
  const Spaces sp = make_spaces(m, k, false);
  const int nv = static_cast<int>(m.vertices.size()), ne = static_cast<int>(m.edges.size());
  EXPECT_EQ(sp.dofs.n_u, 3 * nv + 3 * (k - 1) * ne);
  EXPECT_EQ(sp.dofs.n_retained, sp.dofs.n_u + k * ne);
  std::vector<int> hits(sp.dofs.n_retained, 0);
  for (const ElementDofs& ed : sp.dofs.elements)
    for (int i : ed.retained) {
      ASSERT_GE(i, 0);
      ++hits[i];
    }
  for (int e = 0; e < ne; ++e)
    for (int j = 0; j < k; ++j) EXPECT_EQ(hits[sp.dofs.alpha(e, j)], static_cast<int>(m.edges[e].inc.size()));
}

TEST(Spaces, EdgeNodesAgreeBetweenNeighbors) {
  GenParams g;
  g.nx = 2;
  g.ny = 2;
  g.triangles = true;
  const SurfaceMesh m = gen_benchmark("flat_plate", g);
  const Spaces sp = make_spaces(m, 4, false);
  // Every retained displacement DOF maps to a single physical point.
  std::vector<Vec3d> where(sp.dofs.n_u / 3, Vec3d{1e30, 0, 0});
  for (std::size_t t = 0; t < m.elements.size(); ++t) {
    const Element& el = m.elements[t];
    const LagrangeBasis& lb = sp.basis(el.shape);
    Vec3d X[3];
    for (int i = 0; i < 3; ++i) X[i] = m.vertices[el.v[i]];
    for (int n = 0; n < lb.boundary_size(); ++n) {
      const Vec3d p = map_point(el.shape, X, lb.nodes()[n]);
      Vec3d& w = where[sp.dofs.elements[t].retained[3 * n] / 3];
      if (w[0] > 1e29) w = p;
      EXPECT_LT(norm(w - p), 1e-12);
    }
  }
}

TEST(Spaces, ConstantMomentsSpanTheTangentFrame) {
  const Vec3d x[3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const GeometryFrame g = geometry_frame(Shape::Tri, x, {0.2, 0.2});
  const MomentBasis mb(Shape::Tri, 0);
  std::array<double, 3> out[3];
  mb.eval({0.2, 0.2}, g, out);
  const Mat3d e11 = outer(Vec3d{1, 0, 0}, Vec3d{1, 0, 0});
  const Mat3d e22 = outer(Vec3d{0, 1, 0}, Vec3d{0, 1, 0});
  const Mat3d s12 = 0.5 * (outer(Vec3d{1, 0, 0}, Vec3d{0, 1, 0}) + outer(Vec3d{0, 1, 0}, Vec3d{1, 0, 0}));
  const Mat3d want[3] = {e11, s12, e22};
  for (int d = 0; d < 3; ++d) {
    Mat3d S{};
    for (int c = 0; c < 3; ++c) S = S + out[d][c] * frame_tensor(g.frame, c);
    EXPECT_LT(max_abs(S - want[d]), 1e-15);
  }
}

TEST(Spaces, QuadMomentTraceSpansEdgePolynomials) {
  // The normal-normal trace of the quad moment space on each edge must span
  // P_m, otherwise the hybridized bending system is singular.
  const Vec3d x[4] = {{0, 0, 0}, {1.3, 0.1, 0}, {1.1, 0.9, 0.2}, {-0.1, 1.2, 0}};
  for (int m = 0; m <= 2; ++m) {
    const MomentBasis mb(Shape::Quad, m);
    const QuadratureRule r = quadrature_for(RefDomain::Edge, 2 * m + 2);
    for (int le = 0; le < 4; ++le) {
      const Vec3d a = x[le], b = x[(le + 1) % 4];
      const Vec3d tau = normalized(b - a);
      Eigen::MatrixXd T(r.size(), mb.size());
      for (std::size_t q = 0; q < r.size(); ++q) {
        const auto xi = reference_edge_point(Shape::Quad, le, r.points[q][0]);
        const GeometryFrame g = geometry_frame(Shape::Quad, x, xi);
        const Vec3d mu = normalized(cross(tau, g.normal));
        std::vector<std::array<double, 3>> out(mb.size());
        mb.eval(xi, g, out.data());
        for (int d = 0; d < mb.size(); ++d) {
          Mat3d S{};
          for (int c = 0; c < 3; ++c) S = S + out[d][c] * frame_tensor(g.frame, c);
          T(q, d) = dot(mu, S * mu);
        }
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(T);
      lu.setThreshold(1e-10);
      EXPECT_GE(lu.rank(), m + 1) << "edge " << le << " m=" << m;
    }
  }
}

TEST(Spaces, LegendreValuesAreOrthogonal) {
  const QuadratureRule r = quadrature_for(RefDomain::Edge, 8);
  double p[4];
  Eigen::Matrix4d G = Eigen::Matrix4d::Zero();
  for (std::size_t q = 0; q < r.size(); ++q) {
    legendre_values(4, r.points[q][0], p);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) G(i, j) += r.weights[q] * p[i] * p[j];
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(G(i, j), i == j ? 1.0 / (2 * i + 1) : 0.0, 1e-14);
}

TEST(Spaces, RejectsOrderZero) { EXPECT_THROW(make_spaces(single(Shape::Tri), 0, false), ConfigError); }
