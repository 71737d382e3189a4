#pragma once

// Second-order forward-mode automatic differentiation.
//
// Jet2<N> carries a value, its gradient and its (symmetric, packed upper
// triangle) Hessian with respect to N seeded variables. Integrands are small
// pointwise functions (N <= 16), so the O(N^2) cost per operation is cheap
// compared to the element-level chain rule.

#include <array>
#include <cmath>

namespace shell {

template <int N>
class Jet2 {
 public:
  static constexpr int kSize = N;
  static constexpr int kPacked = N * (N + 1) / 2;

  double val = 0.0;
  std::array<double, N> g{};
  std::array<double, kPacked> h{};

  Jet2() = default;
  Jet2(double v) : val(v) {}  // NOLINT(google-explicit-constructor)

  static Jet2 variable(double v, int index) {
    Jet2 j(v);
    j.g[index] = 1.0;
    return j;
  }

  static constexpr int packed(int i, int j) {
    // i <= j
    return i * N - i * (i - 1) / 2 + (j - i);
  }
  double hess(int i, int j) const {
    return i <= j ? h[packed(i, j)] : h[packed(j, i)];
  }

  Jet2& operator+=(const Jet2& o) {
    val += o.val;
    for (int i = 0; i < N; ++i) g[i] += o.g[i];
    for (int i = 0; i < kPacked; ++i) h[i] += o.h[i];
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    val -= o.val;
    for (int i = 0; i < N; ++i) g[i] -= o.g[i];
    for (int i = 0; i < kPacked; ++i) h[i] -= o.h[i];
    return *this;
  }
  Jet2& operator+=(double s) {
    val += s;
    return *this;
  }
  Jet2& operator-=(double s) {
    val -= s;
    return *this;
  }
  Jet2& operator*=(double s) {
    val *= s;
    for (auto& x : g) x *= s;
    for (auto& x : h) x *= s;
    return *this;
  }
  Jet2& operator*=(const Jet2& o) {
    *this = *this * o;
    return *this;
  }

  friend Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 c;
    c.val = a.val * b.val;
    for (int i = 0; i < N; ++i) c.g[i] = a.val * b.g[i] + b.val * a.g[i];
    int k = 0;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j, ++k)
        c.h[k] = a.val * b.h[k] + b.val * a.h[k] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    return c;
  }

  // f(a) given f(a.val), f'(a.val), f''(a.val).
  Jet2 chain(double f0, double f1, double f2) const {
    Jet2 c;
    c.val = f0;
    for (int i = 0; i < N; ++i) c.g[i] = f1 * g[i];
    int k = 0;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j, ++k) c.h[k] = f1 * h[k] + f2 * g[i] * g[j];
    return c;
  }
};

template <int N>
Jet2<N> operator+(Jet2<N> a, const Jet2<N>& b) {
  a += b;
  return a;
}
template <int N>
Jet2<N> operator-(Jet2<N> a, const Jet2<N>& b) {
  a -= b;
  return a;
}
template <int N>
Jet2<N> operator-(Jet2<N> a) {
  a *= -1.0;
  return a;
}
template <int N>
Jet2<N> operator+(Jet2<N> a, double s) {
  a += s;
  return a;
}
template <int N>
Jet2<N> operator+(double s, Jet2<N> a) {
  a += s;
  return a;
}
template <int N>
Jet2<N> operator-(Jet2<N> a, double s) {
  a -= s;
  return a;
}
template <int N>
Jet2<N> operator-(double s, const Jet2<N>& a) {
  Jet2<N> c = -a;
  c += s;
  return c;
}
template <int N>
Jet2<N> operator*(Jet2<N> a, double s) {
  a *= s;
  return a;
}
template <int N>
Jet2<N> operator*(double s, Jet2<N> a) {
  a *= s;
  return a;
}
template <int N>
Jet2<N> operator/(Jet2<N> a, double s) {
  a *= 1.0 / s;
  return a;
}
template <int N>
Jet2<N> inverse(const Jet2<N>& a) {
  const double r = 1.0 / a.val;
  return a.chain(r, -r * r, 2.0 * r * r * r);
}
template <int N>
Jet2<N> operator/(const Jet2<N>& a, const Jet2<N>& b) {
  return a * inverse(b);
}
template <int N>
Jet2<N> operator/(double s, const Jet2<N>& b) {
  return s * inverse(b);
}

template <int N>
Jet2<N> sqrt(const Jet2<N>& a) {
  const double s = std::sqrt(a.val);
  return a.chain(s, 0.5 / s, -0.25 / (s * a.val));
}

template <int N>
Jet2<N> acos(const Jet2<N>& a) {
  const double x = a.val;
  const double q = 1.0 - x * x;
  const double r = 1.0 / std::sqrt(q);
  return a.chain(std::acos(x), -r, -x * r / q);
}

template <int N>
bool operator<(const Jet2<N>& a, double s) {
  return a.val < s;
}
template <int N>
bool operator>(const Jet2<N>& a, double s) {
  return a.val > s;
}

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet2<N>& x) {
  return x.val;
}

}  // namespace shell
