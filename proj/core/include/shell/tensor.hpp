#pragma once

// Small fixed-size vector/matrix types templated on the scalar so the same
// kinematics can run on doubles and on automatic-differentiation jets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace shell {

template <class T>
struct Vec3 {
  std::array<T, 3> v{};

  Vec3() = default;
  Vec3(T x, T y, T z) : v{x, y, z} {}
  template <class U>
  explicit Vec3(const Vec3<U>& o) : v{T(o[0]), T(o[1]), T(o[2])} {}

  T& operator[](std::size_t i) { return v[i]; }
  const T& operator[](std::size_t i) const { return v[i]; }

  Vec3& operator+=(const Vec3& o) {
    for (int i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
    return *this;
  }
};

// Row-major 3x3.
template <class T>
struct Mat3 {
  std::array<T, 9> a{};

  Mat3() = default;
  template <class U>
  explicit Mat3(const Mat3<U>& o) {
    for (int i = 0; i < 9; ++i) a[i] = T(o.a[i]);
  }

  T& operator()(int i, int j) { return a[3 * i + j]; }
  const T& operator()(int i, int j) const { return a[3 * i + j]; }

  static Mat3 identity() {
    Mat3 m;
    m(0, 0) = T(1.0);
    m(1, 1) = T(1.0);
    m(2, 2) = T(1.0);
    return m;
  }

  Vec3<T> col(int j) const { return {a[j], a[3 + j], a[6 + j]}; }
  Vec3<T> row(int i) const { return {a[3 * i], a[3 * i + 1], a[3 * i + 2]}; }
};

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;

template <class T>
Vec3<T> operator+(Vec3<T> a, const Vec3<T>& b) {
  a += b;
  return a;
}
template <class T>
Vec3<T> operator-(Vec3<T> a, const Vec3<T>& b) {
  a -= b;
  return a;
}
template <class T>
Vec3<T> operator-(const Vec3<T>& a) {
  return {-a[0], -a[1], -a[2]};
}
template <class T, class S>
Vec3<T> operator*(const S& s, const Vec3<T>& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
template <class T, class S>
Vec3<T> operator*(const Vec3<T>& a, const S& s) {
  return {a[0] * s, a[1] * s, a[2] * s};
}
template <class T, class S>
Vec3<T> operator/(const Vec3<T>& a, const S& s) {
  return {a[0] / s, a[1] / s, a[2] / s};
}

template <class T, class U>
auto dot(const Vec3<T>& a, const Vec3<U>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <class T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

template <class T>
T norm(const Vec3<T>& a) {
  using std::sqrt;
  return sqrt(dot(a, a));
}

template <class T>
Vec3<T> normalized(const Vec3<T>& a) {
  return a / norm(a);
}

template <class T>
Mat3<T> operator+(Mat3<T> a, const Mat3<T>& b) {
  for (int i = 0; i < 9; ++i) a.a[i] += b.a[i];
  return a;
}
template <class T>
Mat3<T> operator-(Mat3<T> a, const Mat3<T>& b) {
  for (int i = 0; i < 9; ++i) a.a[i] -= b.a[i];
  return a;
}
template <class T, class S>
Mat3<T> operator*(const S& s, Mat3<T> a) {
  for (int i = 0; i < 9; ++i) a.a[i] = s * a.a[i];
  return a;
}

template <class T>
Mat3<T> operator*(const Mat3<T>& a, const Mat3<T>& b) {
  Mat3<T> c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T s = a(i, 0) * b(0, j);
      s += a(i, 1) * b(1, j);
      s += a(i, 2) * b(2, j);
      c(i, j) = s;
    }
  return c;
}

template <class T>
Vec3<T> operator*(const Mat3<T>& a, const Vec3<T>& x) {
  return {a(0, 0) * x[0] + a(0, 1) * x[1] + a(0, 2) * x[2],
          a(1, 0) * x[0] + a(1, 1) * x[1] + a(1, 2) * x[2],
          a(2, 0) * x[0] + a(2, 1) * x[1] + a(2, 2) * x[2]};
}

template <class T>
Mat3<T> transpose(const Mat3<T>& a) {
  Mat3<T> t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = a(j, i);
  return t;
}

template <class T>
T trace(const Mat3<T>& a) {
  return a(0, 0) + a(1, 1) + a(2, 2);
}

// Frobenius product A:B.
template <class T, class U>
auto ddot(const Mat3<T>& a, const Mat3<U>& b) {
  auto s = a.a[0] * b.a[0];
  for (int i = 1; i < 9; ++i) s += a.a[i] * b.a[i];
  return s;
}

template <class T>
Mat3<T> outer(const Vec3<T>& a, const Vec3<T>& b) {
  Mat3<T> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
  return m;
}

template <class T>
T det(const Mat3<T>& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

// cof(A)_ij = (-1)^(i+j) det(minor_ij); equals det(A) A^{-T} when A is invertible.
template <class T>
Mat3<T> cofactor(const Mat3<T>& a) {
  Mat3<T> c;
  c(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  c(0, 1) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  c(0, 2) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  c(1, 0) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  c(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  c(1, 2) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  c(2, 0) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  c(2, 1) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  c(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return c;
}

inline Mat3d projector(const Vec3d& n) {
  return Mat3d::identity() - outer(n, n);
}

inline double max_abs(const Mat3d& m) {
  double s = 0.0;
  for (double x : m.a) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace shell
