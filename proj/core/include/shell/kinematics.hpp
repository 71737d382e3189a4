#pragma once

#include <array>

#include "shell/error.hpp"
#include "shell/jet.hpp"
#include "shell/mesh.hpp"
#include "shell/tensor.hpp"

namespace shell {

inline constexpr double kDegenerateJ = 1e-10;
inline constexpr double kAcosTolerance = 1e-10;
inline constexpr double kProjectionTolerance = 1e-6;

enum class AngleMode { Exact, Simplified };

// F = P + grad_tau u.
Mat3d deformation_gradient(const GeometryFrame& g, const Mat3d& grad_u);

struct DeformedFrames {
  Vec3d normal;    // cof(F) nu / J
  Vec3d tangent;   // F tau / J_b
  Vec3d conormal;  // sign * normal x tangent, sign taken from mu = sign * nu x tau
  double J = 1.0;
  double Jb = 1.0;
};

DeformedFrames deformed_frames(const Mat3d& F, const Vec3d& nu, const Vec3d& tau, const Vec3d& mu);

// Conormal from the pseudo-inverse form: F^{-T} mu normalized within the
// deformed tangent plane.
Vec3d conormal_pseudo_inverse(const Mat3d& F, const Vec3d& nu, const Vec3d& mu);

// E = (F^T F - P) / 2.
Mat3d green_strain(const Mat3d& F, const Mat3d& P);

// Sum_i nuhat_i * (tangential Hessian of u_i) as a global tangential 3x3
// tensor. du[i][a] = d u_i / d xi_a; d2u[i] = {d11, d12, d22} u_i.
Mat3d weighted_surface_hessian(const GeometryFrame& g, const std::array<std::array<double, 2>, 3>& du,
                               const std::array<std::array<double, 3>, 3>& d2u, const Vec3d& nuhat);

// sigma : (H + (1 - nu . nuhat) grad_tau nu).
double bending_integrand(const Mat3d& sigma, const Mat3d& hessian, const GeometryFrame& g,
                         const Vec3d& nuhat);

// Unsigned dihedral angle between two unit normals; the cosine is clamped
// within kAcosTolerance, beyond it NumericError.
double unit_angle(const Vec3d& a, const Vec3d& b);
double checked_acos(double c);

// angle(nuL, nuR) - angle(nuhatL, nuhatR).
double angle_difference(const Vec3d& nuL, const Vec3d& nuR, const Vec3d& nuhatL,
                        const Vec3d& nuhatR);

// Element-boundary split measured against averaged normals:
//   exact:      sum_T acos(N . mu_T) - acos(Nhat . muhat_T)
//   simplified: sum_T Nhat . muhat_T - N . mu_T
double split_angle_difference(const Vec3d& N, const Vec3d& muL, const Vec3d& muR, const Vec3d& Nhat,
                              const Vec3d& muhatL, const Vec3d& muhatR, AngleMode mode);

// P_perp N / |P_perp N| with P_perp = I - tau tau^T.
Vec3d lagged_averaged_normal(const Vec3d& N, const Vec3d& tauhat);

// Variations of the deformed frame quantities along grad_tau v.
struct FrameVariation {
  Vec3d dc;       // d(cof(F) nu) = F^#_{nu,i} : grad v, cross-product form
  Mat3d fsharp;   // F^#_{nu,nuhat}
  double dJ = 0;  // F^#_{nu,nuhat} : grad v
  Vec3d dnormal;  // (dc - dJ nuhat) / J
  double dJb = 0; // tauhat . grad v tau
};
// (tau, mu, nu) must be a right-handed orthonormal triple.
FrameVariation directional_derivatives(const Mat3d& F, const Vec3d& nu, const Vec3d& tau,
                                       const Vec3d& mu, const Mat3d& grad_v);

// d/de cof(A + e B) at e = 0 via the minor expansion.
Mat3d cofactor_derivative(const Mat3d& A, const Mat3d& B);

// ------------------------------------------------- templated pointwise kernels

// Deformed frame columns F e_a = e_a + w_a from reference derivatives
// p[i*2+k] = d u_i / d xi_k and the frame components g[a][k] = dual_k . e_a.
template <class T>
std::array<Vec3<T>, 2> frame_images(const std::array<Vec3d, 2>& e, const std::array<std::array<double, 2>, 2>& g,
                                    const T* p) {
  std::array<Vec3<T>, 2> fe;
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 3; ++i) fe[a][i] = e[a][i] + p[2 * i] * g[a][0] + p[2 * i + 1] * g[a][1];
  return fe;
}

template <class T>
T checked_acos_t(const T& c) {
  using std::acos;
  const double v = value_of(c);
  if (v > 1.0 + kAcosTolerance || v < -1.0 - kAcosTolerance)
    throw NumericError("arccos argument outside [-1,1] beyond tolerance");
  if (v >= 1.0) return T(0.0);
  if (v <= -1.0) return T(M_PI);
  return acos(c);
}

}  // namespace shell
