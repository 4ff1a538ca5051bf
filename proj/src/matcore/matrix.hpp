#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "error.hpp"

namespace lyapgap {

// Dense real linear algebra for fixed small dimensions 2..8.
inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 8;

class Vec {
 public:
  Vec() : d_(0) { x_.fill(0.0); }
  explicit Vec(int d) : d_(d) {
    check_dim(d);
    x_.fill(0.0);
  }
  Vec(int d, std::initializer_list<double> xs) : Vec(d) {
    int i = 0;
    for (double x : xs) {
      if (i >= d_) break;
      x_[static_cast<size_t>(i++)] = x;
    }
  }

  static Vec unit(int d, int axis) {
    Vec e(d);
    e[axis] = 1.0;
    return e;
  }

  int dim() const { return d_; }
  double& operator[](int i) { return x_[static_cast<size_t>(i)]; }
  double operator[](int i) const { return x_[static_cast<size_t>(i)]; }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < d_; ++i) s += x_[static_cast<size_t>(i)] * o[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }

  Vec operator+(const Vec& o) const {
    Vec r(d_);
    for (int i = 0; i < d_; ++i) r[i] = (*this)[i] + o[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r(d_);
    for (int i = 0; i < d_; ++i) r[i] = (*this)[i] - o[i];
    return r;
  }
  Vec operator*(double c) const {
    Vec r(d_);
    for (int i = 0; i < d_; ++i) r[i] = (*this)[i] * c;
    return r;
  }

  // Unit vector in the same direction; Domain error on the zero vector.
  Vec normalized() const {
    double n = norm();
    if (!(n > 0.0)) fail(ErrorKind::Domain, "cannot normalize zero vector");
    return *this * (1.0 / n);
  }

  bool finite() const {
    for (int i = 0; i < d_; ++i)
      if (!std::isfinite((*this)[i])) return false;
    return true;
  }

 private:
  static void check_dim(int d) {
    if (d < 1 || d > kMaxDim)
      fail(ErrorKind::InvalidArgument, "vector dimension out of range");
  }

  int d_;
  std::array<double, kMaxDim> x_;
};

inline Vec operator*(double c, const Vec& v) { return v * c; }

// Row-major d x d matrix, d in [2, 8]. Value type, immutable by convention
// once handed to an operation.
class Matrix {
 public:
  Matrix() : d_(0) { a_.fill(0.0); }
  explicit Matrix(int d) : d_(d) {
    check_dim(d);
    a_.fill(0.0);
  }
  Matrix(int d, std::initializer_list<double> xs) : Matrix(d) {
    int i = 0;
    for (double x : xs) {
      if (i >= d_ * d_) break;
      a_[static_cast<size_t>(i++)] = x;
    }
  }

  static Matrix zero(int d) { return Matrix(d); }
  static Matrix identity(int d) {
    Matrix m(d);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
  }
  static Matrix diagonal(const Vec& s) {
    Matrix m(s.dim());
    for (int i = 0; i < s.dim(); ++i) m.at(i, i) = s[i];
    return m;
  }
  // Rotation by `theta` in the (p, q) coordinate plane, identity elsewhere.
  static Matrix plane_rotation(int d, int p, int q, double theta) {
    Matrix r = identity(d);
    double c = std::cos(theta), s = std::sin(theta);
    r.at(p, p) = c;
    r.at(q, q) = c;
    r.at(p, q) = -s;
    r.at(q, p) = s;
    return r;
  }

  int dim() const { return d_; }
  double& at(int i, int j) { return a_[static_cast<size_t>(i * d_ + j)]; }
  double at(int i, int j) const { return a_[static_cast<size_t>(i * d_ + j)]; }
  double operator()(int i, int j) const { return at(i, j); }

  Vec col(int j) const {
    Vec v(d_);
    for (int i = 0; i < d_; ++i) v[i] = at(i, j);
    return v;
  }
  Vec row(int i) const {
    Vec v(d_);
    for (int j = 0; j < d_; ++j) v[j] = at(i, j);
    return v;
  }
  void set_col(int j, const Vec& v) {
    for (int i = 0; i < d_; ++i) at(i, j) = v[i];
  }

  Matrix transpose() const {
    Matrix t(d_);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  Matrix operator+(const Matrix& o) const {
    Matrix r(d_);
    for (int i = 0; i < d_ * d_; ++i)
      r.a_[static_cast<size_t>(i)] =
          a_[static_cast<size_t>(i)] + o.a_[static_cast<size_t>(i)];
    return r;
  }
  Matrix operator-(const Matrix& o) const {
    Matrix r(d_);
    for (int i = 0; i < d_ * d_; ++i)
      r.a_[static_cast<size_t>(i)] =
          a_[static_cast<size_t>(i)] - o.a_[static_cast<size_t>(i)];
    return r;
  }
  Matrix operator*(double c) const {
    Matrix r(d_);
    for (int i = 0; i < d_ * d_; ++i)
      r.a_[static_cast<size_t>(i)] = a_[static_cast<size_t>(i)] * c;
    return r;
  }
  Matrix operator*(const Matrix& o) const {
    Matrix r(d_);
    for (int i = 0; i < d_; ++i)
      for (int k = 0; k < d_; ++k) {
        double aik = at(i, k);
        if (aik == 0.0) continue;
        for (int j = 0; j < d_; ++j) r.at(i, j) += aik * o.at(k, j);
      }
    return r;
  }
  Vec operator*(const Vec& v) const {
    Vec r(d_);
    for (int i = 0; i < d_; ++i) {
      double s = 0.0;
      for (int j = 0; j < d_; ++j) s += at(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  // max |m_ij|
  double inf_abs() const {
    double m = 0.0;
    for (int i = 0; i < d_ * d_; ++i)
      m = std::max(m, std::fabs(a_[static_cast<size_t>(i)]));
    return m;
  }
  double frobenius() const {
    double s = 0.0;
    for (int i = 0; i < d_ * d_; ++i)
      s += a_[static_cast<size_t>(i)] * a_[static_cast<size_t>(i)];
    return std::sqrt(s);
  }

  bool finite() const {
    for (int i = 0; i < d_ * d_; ++i)
      if (!std::isfinite(a_[static_cast<size_t>(i)])) return false;
    return true;
  }

 private:
  static void check_dim(int d) {
    if (d < kMinDim || d > kMaxDim)
      fail(ErrorKind::InvalidArgument, "matrix dimension out of range [2,8]");
  }

  int d_;
  std::array<double, kMaxDim * kMaxDim> a_;
};

inline Matrix operator*(double c, const Matrix& m) { return m * c; }

}  // namespace lyapgap
