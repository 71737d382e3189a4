#include "shell/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace shell {

Mat3d deformation_gradient(const GeometryFrame& g, const Mat3d& grad_u) { return g.projector + grad_u; }

DeformedFrames deformed_frames(const Mat3d& F, const Vec3d& nu, const Vec3d& tau, const Vec3d& mu) {
  DeformedFrames d;
  const Vec3d c = cofactor(F) * nu;
  d.J = norm(c);
  if (!(d.J > kDegenerateJ)) throw DegenerateDeformation("deformation collapses the element (J <= tol)");
  d.normal = c / d.J;
  const Vec3d ft = F * tau;
  d.Jb = norm(ft);
  if (!(d.Jb > kDegenerateJ)) throw DegenerateDeformation("deformation collapses an edge (J_b <= tol)");
  d.tangent = ft / d.Jb;
  const double s = dot(mu, cross(nu, tau)) >= 0.0 ? 1.0 : -1.0;
  d.conormal = s * cross(d.normal, d.tangent);
  return d;
}

namespace {
Mat3d inverse(const Mat3d& a) {
  const double d = det(a);
  return (1.0 / d) * transpose(cofactor(a));
}
}  // namespace

Vec3d conormal_pseudo_inverse(const Mat3d& F, const Vec3d& nu, const Vec3d& mu) {
  const Mat3d pinv = inverse(transpose(F) * F + outer(nu, nu)) * transpose(F);
  return normalized(transpose(pinv) * mu);
}

Mat3d green_strain(const Mat3d& F, const Mat3d& P) { return 0.5 * (transpose(F) * F - P); }

Mat3d weighted_surface_hessian(const GeometryFrame& g, const std::array<std::array<double, 2>, 3>& du,
                               const std::array<std::array<double, 3>, 3>& d2u, const Vec3d& nuhat) {
  // Covariant components X_cd = sum_i nuhat_i (d_cd u_i - d_k u_i (dual_k . Phi_cd)).
  const double gam[2] = {dot(g.dual[0], g.d12), dot(g.dual[1], g.d12)};
  double x11 = 0, x12 = 0, x22 = 0;
  for (int i = 0; i < 3; ++i) {
    x11 += nuhat[i] * d2u[i][0];
    x12 += nuhat[i] * (d2u[i][1] - du[i][0] * gam[0] - du[i][1] * gam[1]);
    x22 += nuhat[i] * d2u[i][2];
  }
  return x11 * outer(g.dual[0], g.dual[0]) + x12 * (outer(g.dual[0], g.dual[1]) + outer(g.dual[1], g.dual[0])) +
         x22 * outer(g.dual[1], g.dual[1]);
}

double bending_integrand(const Mat3d& sigma, const Mat3d& hessian, const GeometryFrame& g,
                         const Vec3d& nuhat) {
  return ddot(sigma, hessian + (1.0 - dot(g.normal, nuhat)) * g.weingarten);
}

double checked_acos(double c) { return checked_acos_t(c); }

double unit_angle(const Vec3d& a, const Vec3d& b) { return checked_acos(dot(a, b)); }

double angle_difference(const Vec3d& nuL, const Vec3d& nuR, const Vec3d& nuhatL, const Vec3d& nuhatR) {
  return unit_angle(nuL, nuR) - unit_angle(nuhatL, nuhatR);
}

double split_angle_difference(const Vec3d& N, const Vec3d& muL, const Vec3d& muR, const Vec3d& Nhat,
                              const Vec3d& muhatL, const Vec3d& muhatR, AngleMode mode) {
  if (mode == AngleMode::Simplified)
    return (dot(Nhat, muhatL) - dot(N, muL)) + (dot(Nhat, muhatR) - dot(N, muR));
  return (checked_acos(dot(N, muL)) - checked_acos(dot(Nhat, muhatL))) +
         (checked_acos(dot(N, muR)) - checked_acos(dot(Nhat, muhatR)));
}

Vec3d lagged_averaged_normal(const Vec3d& N, const Vec3d& tauhat) {
  const Vec3d p = N - dot(N, tauhat) * tauhat;
  const double n = norm(p);
  if (!(n > kProjectionTolerance))
    throw ProjectionDegenerate("lagged normal nearly parallel to the deformed edge tangent");
  return p / n;
}

FrameVariation directional_derivatives(const Mat3d& F, const Vec3d& nu, const Vec3d& tau, const Vec3d& mu,
                                       const Mat3d& grad_v) {
  FrameVariation r;
  const Vec3d ft = F * tau, fm = F * mu;
  const Vec3d c = cross(ft, fm);
  const double J = norm(c);
  if (!(J > kDegenerateJ)) throw DegenerateDeformation("deformation collapses the element (J <= tol)");
  const Vec3d nh = c / J;
  r.dc = cross(grad_v * tau, fm) + cross(ft, grad_v * mu);
  r.fsharp = outer(cross(fm, nh), tau) + outer(cross(nh, ft), mu);
  r.dJ = ddot(r.fsharp, grad_v);
  r.dnormal = (r.dc - r.dJ * nh) / J;
  const double jb = norm(ft);
  r.dJb = dot(ft / jb, grad_v * tau);
  (void)nu;
  return r;
}

Mat3d cofactor_derivative(const Mat3d& A, const Mat3d& B) {
  return cofactor(A + B) - cofactor(A) - cofactor(B);
}

}  // namespace shell
