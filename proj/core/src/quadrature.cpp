#include "shell/quadrature.hpp"

#include <cmath>

#include "shell/error.hpp"

namespace shell {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    // Map [-1,1] -> [0,1], ascending order.
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

QuadratureRule quadrature_for(RefDomain domain, int degree) {
  if (degree < 0) throw ConfigError("quadrature degree must be non-negative");
  QuadratureRule r;
  r.degree = degree;
  std::vector<double> x, w;
  switch (domain) {
    case RefDomain::Edge: {
      const int n = degree / 2 + 1;
      gauss_legendre(n, x, w);
      for (int i = 0; i < n; ++i) {
        r.points.push_back({x[i], 0.0});
        r.weights.push_back(w[i]);
      }
      r.degree = 2 * n - 1;
      break;
    }
    case RefDomain::Quad: {
      const int n = degree / 2 + 1;
      gauss_legendre(n, x, w);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          r.points.push_back({x[i], x[j]});
          r.weights.push_back(w[i] * w[j]);
        }
      r.degree = 2 * n - 1;
      break;
    }
    case RefDomain::Tri: {
      if (degree <= 1) {
        r.points = {{1.0 / 3, 1.0 / 3}};
        r.weights = {0.5};
        r.degree = 1;
      } else if (degree == 2) {
        r.points = {{1.0 / 6, 1.0 / 6}, {2.0 / 3, 1.0 / 6}, {1.0 / 6, 2.0 / 3}};
        r.weights = {1.0 / 6, 1.0 / 6, 1.0 / 6};
        r.degree = 2;
      } else {
        // Collapsed Gauss: (s,t) -> (s(1-t), t) carries an extra linear factor.
        const int n = (degree + 2 + 1) / 2;
        gauss_legendre(n, x, w);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            r.points.push_back({x[i] * (1.0 - x[j]), x[j]});
            r.weights.push_back(w[i] * w[j] * (1.0 - x[j]));
          }
        r.degree = 2 * n - 2;
      }
      break;
    }
  }
  return r;
}

}  // namespace shell
