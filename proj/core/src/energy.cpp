#include "shell/energy.hpp"

#include "shell/error.hpp"

namespace shell {

void Material::validate() const {
  if (!(E > 0.0)) throw ConfigError("Young's modulus must be positive");
  if (!(nu >= 0.0 && nu < 0.5)) throw ConfigError("Poisson ratio must lie in [0, 0.5)");
  if (!(t > 0.0)) throw ConfigError("thickness must be positive");
}

double norm_M_density(const Mat3d& A, const Material& m) {
  const double tr = trace(A);
  return m.plane_stress_modulus() * (m.nu * tr * tr + (1.0 - m.nu) * ddot(A, transpose(A)));
}

double norm_Minv_density(const Mat3d& A, const Material& m) {
  const double tr = trace(A);
  return (1.0 + m.nu) / m.E * (ddot(A, transpose(A)) - m.minv_trace_coefficient() * tr * tr);
}

void norm_Minv_coeffs_derivatives(const double* c, const Material& m, double* grad, double (*hess)[3]) {
  const double s = (1.0 + m.nu) / m.E;
  const double b = m.minv_trace_coefficient();
  const double tr = c[0] + c[2];
  if (grad) {
    grad[0] = s * (2.0 * c[0] - 2.0 * b * tr);
    grad[1] = s * c[1];
    grad[2] = s * (2.0 * c[2] - 2.0 * b * tr);
  }
  if (hess) {
    hess[0][0] = s * (2.0 - 2.0 * b);
    hess[0][1] = 0.0;
    hess[0][2] = -2.0 * s * b;
    hess[1][0] = 0.0;
    hess[1][1] = s;
    hess[1][2] = 0.0;
    hess[2][0] = -2.0 * s * b;
    hess[2][1] = 0.0;
    hess[2][2] = s * (2.0 - 2.0 * b);
  }
}

Mat3d membrane_stress(const Mat3d& strain, const Mat3d& P, const Material& m) {
  return m.plane_stress_modulus() * ((1.0 - m.nu) * strain + (m.nu * trace(strain)) * P);
}

}  // namespace shell
