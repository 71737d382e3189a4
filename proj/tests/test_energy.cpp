#include <gtest/gtest.h>

#include <random>

#include "shell/energy.hpp"
#include "shell/generators.hpp"
#include "shell/model.hpp"
#include "test_util.hpp"

using namespace shell;

namespace {

const Vec3d e1{1, 0, 0}, e2{0, 1, 0};

Mat3d planar_projector() { return outer(e1, e1) + outer(e2, e2); }

Mat3d random_tangential(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng);
  return a * outer(e1, e1) + b * (outer(e1, e2) + outer(e2, e1)) + c * outer(e2, e2);
}

}  // namespace

TEST(MaterialNorms, ProjectorExamples) {
  Material m{1000.0, 0.0, 0.1};
  EXPECT_NEAR(norm_M_density(planar_projector(), m), 2000.0, 1e-10);
  m.nu = 0.3;
  EXPECT_NEAR(norm_M_density(planar_projector(), m), 1000.0 * 2.6 / 0.91, 1e-9);
  EXPECT_NEAR(norm_M_density(Mat3d{}, m), 0.0, 0.0);
}

TEST(MaterialNorms, DualNormInvertsTheMaterialNorm) {
  // |M A|^2_{M^-1} = A : M A = |A|^2_M when the trace coefficient is nu/(1+nu).
  std::mt19937 rng(1);
  for (double nu : {0.0, 0.25, 0.3, 0.45}) {
    Material m{7.0, nu, 0.2, MinvForm::AlgebraicDual};
    for (int trial = 0; trial < 20; ++trial) {
      const Mat3d A = random_tangential(rng);
      const Mat3d S = membrane_stress(A, planar_projector(), m);
      const double ref = norm_M_density(A, m);
      EXPECT_NEAR(ddot(S, A), ref, 1e-12 * (1.0 + ref));
      EXPECT_NEAR(norm_Minv_density(S, m), ref, 1e-11 * (1.0 + ref));
    }
  }
}

TEST(MaterialNorms, PublishedTraceCoefficientAgreesAtZeroPoisson) {
  std::mt19937 rng(2);
  Material a{3.0, 0.0, 1.0, MinvForm::AsPublished}, b{3.0, 0.0, 1.0, MinvForm::AlgebraicDual};
  for (int trial = 0; trial < 10; ++trial) {
    const Mat3d S = random_tangential(rng);
    EXPECT_DOUBLE_EQ(norm_Minv_density(S, a), norm_Minv_density(S, b));
  }
  a.nu = b.nu = 0.3;
  EXPECT_NEAR(a.minv_trace_coefficient(), 0.3 / 1.6, 1e-15);
  EXPECT_NEAR(b.minv_trace_coefficient(), 0.3 / 1.3, 1e-15);
}

TEST(MaterialNorms, FrameCoefficientsMatchTheTensorForm) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Material m{5.0, 0.3, 1.0};
  for (int trial = 0; trial < 10; ++trial) {
    // Basis e1e1, sym(e1e2) = (e1e2 + e2e1)/2, e2e2.
    const double c[3] = {u(rng), u(rng), u(rng)};
    const Mat3d S = c[0] * outer(e1, e1) + (0.5 * c[1]) * (outer(e1, e2) + outer(e2, e1)) + c[2] * outer(e2, e2);
    EXPECT_NEAR(norm_Minv_coeffs(c, m), norm_Minv_density(S, m), 1e-13);
    EXPECT_NEAR(norm_M_frame(c[0], 0.5 * c[1], c[2], m), norm_M_density(S, m), 1e-12);
  }
}

TEST(MaterialNorms, DualCoefficientDerivatives) {
  Material m{5.0, 0.3, 1.0};
  const double c[3] = {0.3, -0.7, 1.1};
  double g[3], H[3][3];
  norm_Minv_coeffs_derivatives(c, m, g, H);
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    double cp[3] = {c[0], c[1], c[2]}, cm[3] = {c[0], c[1], c[2]};
    cp[i] += h, cm[i] -= h;
    EXPECT_NEAR(g[i], (norm_Minv_coeffs(cp, m) - norm_Minv_coeffs(cm, m)) / (2 * h), 1e-8);
    double gp[3], gm[3], Hd[3][3];
    norm_Minv_coeffs_derivatives(cp, m, gp, Hd);
    norm_Minv_coeffs_derivatives(cm, m, gm, Hd);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(H[j][i], (gp[j] - gm[j]) / (2 * h), 1e-8);
  }
}

TEST(MembraneStress, UniaxialStretch) {
  Material m{1000.0, 0.0, 0.1};
  const double lam = 1.1;
  const Mat3d E = (0.5 * (lam * lam - 1.0)) * outer(e1, e1);
  const Mat3d S = membrane_stress(E, planar_projector(), m);
  EXPECT_NEAR(S(0, 0), 1000.0 * 0.5 * (lam * lam - 1.0), 1e-10);
  EXPECT_NEAR(S(1, 1), 0.0, 1e-12);
  m.nu = 0.3;
  const Mat3d S3 = membrane_stress(E, planar_projector(), m);
  EXPECT_NEAR(S3(1, 1), 0.3 * S3(0, 0), 1e-10);
}

TEST(MaterialValidation, RejectsNonphysicalParameters) {
  EXPECT_THROW((Material{-1.0, 0.3, 0.1}.validate()), ConfigError);
  EXPECT_THROW((Material{1.0, 0.5, 0.1}.validate()), ConfigError);
  EXPECT_THROW((Material{1.0, 0.3, 0.0}.validate()), ConfigError);
  EXPECT_NO_THROW((Material{1.0, 0.3, 0.1}.validate()));
}

TEST(Lagrangian, ZeroStateIsZero) {
  for (int k : {1, 2, 3}) {
    GenParams gp;
    gp.nx = 3;
    Model model(gen_benchmark("cant_moment", gp), Material{1000.0, 0.3, 0.1},
                ProblemSpec{{{"clamped", BcType::Clamped}}, {}, {}}, ModelOptions{k});
    const EnergyBreakdown e = model.lagrangian(model.initial_state());
    EXPECT_EQ(e.total(), 0.0) << "order " << k;
  }
}

TEST(Lagrangian, UniformStretchOfAUnitSquare) {
  const double lam = 1.1, t = 0.1;
  for (bool tri : {false, true})
    for (int k : {1, 2}) {
      GenParams gp;
      gp.nx = 2;
      gp.triangles = tri;
      Material mat{1000.0, 0.3, t};
      Model model(gen_benchmark("flat_plate", gp), mat, ProblemSpec{}, ModelOptions{k, false});
      State s = model.initial_state();
      test_util::set_displacement(model, s, [&](const Vec3d& X) { return Vec3d{(lam - 1.0) * X[0], 0.0, 0.0}; });
      const EnergyBreakdown e = model.lagrangian(s);
      const double Exx = 0.5 * (lam * lam - 1.0);
      const double expected = 0.5 * t * mat.plane_stress_modulus() * Exx * Exx;
      EXPECT_NEAR(e.membrane, expected, 1e-12 * expected) << "order " << k;
      EXPECT_NEAR(e.bending_coupling, 0.0, 1e-12);
      EXPECT_NEAR(e.total(), expected, 1e-12 * expected);
    }
}
