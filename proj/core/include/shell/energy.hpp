#pragma once

#include "shell/tensor.hpp"

namespace shell {

// Coefficient of tr(A)^2 in the inverse material norm. AsPublished keeps
// nu/(2nu+1); AlgebraicDual uses nu/(1+nu), the exact dual of the M norm.
enum class MinvForm { AsPublished, AlgebraicDual };

struct Material {
  double E = 1.0;
  double nu = 0.0;
  double t = 1.0;
  MinvForm minv = MinvForm::AsPublished;

  void validate() const;
  double plane_stress_modulus() const { return E / (1.0 - nu * nu); }
  double minv_trace_coefficient() const {
    return minv == MinvForm::AsPublished ? nu / (2.0 * nu + 1.0) : nu / (1.0 + nu);
  }
};

// E/(1-nu^2) (nu tr(A)^2 + (1-nu) tr(A^2)).
double norm_M_density(const Mat3d& A, const Material& m);
// (1+nu)/E (tr(A^2) - beta tr(A)^2), beta per Material::minv.
double norm_Minv_density(const Mat3d& A, const Material& m);

// Same densities for a symmetric tensor given by components in an
// orthonormal tangent frame.
template <class T>
T norm_M_frame(const T& a11, const T& a12, const T& a22, const Material& m) {
  const T tr = a11 + a22;
  const T tr2 = a11 * a11 + 2.0 * (a12 * a12) + a22 * a22;
  return m.plane_stress_modulus() * (m.nu * (tr * tr) + (1.0 - m.nu) * tr2);
}

// Coefficient triple (c1, c2, c3) in the basis e1e1, sym(e1e2), e2e2.
inline double norm_Minv_coeffs(const double* c, const Material& m) {
  const double tr = c[0] + c[2];
  const double tr2 = c[0] * c[0] + 0.5 * c[1] * c[1] + c[2] * c[2];
  return (1.0 + m.nu) / m.E * (tr2 - m.minv_trace_coefficient() * tr * tr);
}
// Gradient and (constant) Hessian of norm_Minv_coeffs.
void norm_Minv_coeffs_derivatives(const double* c, const Material& m, double* grad, double (*hess)[3]);

// Plane-stress membrane stress E/(1-nu^2) ((1-nu) E + nu tr(E) P).
Mat3d membrane_stress(const Mat3d& strain, const Mat3d& P, const Material& m);

// Signed terms of the discrete Lagrangian:
//   total = membrane + locking_aux + moment_quadratic - bending_coupling - external_work
struct EnergyBreakdown {
  double membrane = 0.0;          // t/2 |E|_M^2, or <R,E> with the locking augmentation
  double bending_coupling = 0.0;  // B(u, sigma, alpha)
  double moment_quadratic = 0.0;  // -6/t^3 |sigma|_{M^-1}^2
  double locking_aux = 0.0;       // -1/(2t) |R|_{M^-1}^2
  double external_work = 0.0;

  double total() const { return membrane + locking_aux + moment_quadratic - bending_coupling - external_work; }
  EnergyBreakdown& operator+=(const EnergyBreakdown& o) {
    membrane += o.membrane;
    bending_coupling += o.bending_coupling;
    moment_quadratic += o.moment_quadratic;
    locking_aux += o.locking_aux;
    external_work += o.external_work;
    return *this;
  }
};

}  // namespace shell
