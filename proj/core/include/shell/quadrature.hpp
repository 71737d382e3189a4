#pragma once

#include <array>
#include <vector>

namespace shell {

enum class RefDomain { Edge, Tri, Quad };

// Points on the unit edge [0,1] use only the first coordinate.
struct QuadratureRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  int degree = 0;  // guaranteed polynomial exactness

  std::size_t size() const { return weights.size(); }
};

// Gauss-Legendre points and weights on [0,1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Rule exact for polynomials of total degree `degree` (tensor degree on
// quads). Never returns a rule of lower exactness than requested.
QuadratureRule quadrature_for(RefDomain domain, int degree);

}  // namespace shell
