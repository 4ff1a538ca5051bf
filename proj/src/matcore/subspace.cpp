#include "matcore/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "matcore/svd.hpp"

namespace lyapgap {

Subspace Subspace::from_spanning(int ambient_dim, const std::vector<Vec>& span) {
  if (ambient_dim < kMinDim || ambient_dim > kMaxDim)
    fail(ErrorKind::InvalidArgument, "subspace: ambient dimension out of range");
  if (span.empty() || static_cast<int>(span.size()) >= ambient_dim)
    fail(ErrorKind::InvalidArgument,
         "subspace: need 1 <= count < ambient_dim spanning vectors");

  std::vector<Vec> basis;
  for (const Vec& raw : span) {
    if (raw.dim() != ambient_dim)
      fail(ErrorKind::InvalidArgument, "subspace: vector dimension mismatch");
    Vec w = raw;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) w = w - b * w.dot(b);
    double n = w.norm();
    if (!(n > 1e-13 * std::max(1.0, raw.norm())))
      fail(ErrorKind::InvalidArgument, "subspace: spanning set is dependent");
    basis.push_back(w * (1.0 / n));
  }
  return Subspace(ambient_dim, std::move(basis));
}

Subspace Subspace::span_of_axes(int ambient_dim,
                                std::initializer_list<int> axes) {
  std::vector<Vec> span;
  for (int a : axes) span.push_back(Vec::unit(ambient_dim, a));
  return from_spanning(ambient_dim, span);
}

Vec Subspace::project(const Vec& x) const {
  Vec p(ambient_);
  for (const Vec& b : basis_) p = p + b * x.dot(b);
  return p;
}

double angle(const Vec& u, const Vec& v) {
  if (!(u.norm() > 0.0) || !(v.norm() > 0.0))
    fail(ErrorKind::Domain, "angle: zero vector");
  return (u.normalized() - v.normalized()).norm();
}

double angle_min_sign(const Vec& u, const Vec& v) {
  return std::min(angle(u, v), angle(u, v * -1.0));
}

double sphere_distance(const Subspace& e, const Subspace& f) {
  if (e.ambient_dim() != f.ambient_dim())
    fail(ErrorKind::InvalidArgument, "sphere_distance: ambient dim mismatch");
  const int d = e.ambient_dim();
  const int p = e.dim(), q = f.dim();
  const int m = std::max(kMinDim, std::max(p, q));

  // cos of the smallest principal angle; zero-padding leaves it alone.
  Matrix overlap(m);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j)
      overlap.at(i, j) = e.basis()[static_cast<size_t>(i)].dot(
          f.basis()[static_cast<size_t>(j)]);
  double cos1 = std::min(1.0, svd(overlap).s[0]);

  // sin of the same angle from the residuals of F against E; this stays
  // accurate when the subspaces nearly touch, where 2 - 2 cos cancels.
  Matrix resid(d);
  for (int j = 0; j < q; ++j) {
    Vec r = f.basis()[static_cast<size_t>(j)] -
            e.project(f.basis()[static_cast<size_t>(j)]);
    resid.set_col(j, r);
  }
  double sin1 = std::min(1.0, svd(resid).s[q - 1]);

  // chord = 2 sin(theta/2) = sin(theta) / cos(theta/2)
  return sin1 / std::sqrt((1.0 + cos1) / 2.0);
}

Matrix oblique_projection(const Subspace& e, const Subspace& f) {
  const int d = e.ambient_dim();
  if (f.ambient_dim() != d)
    fail(ErrorKind::InvalidArgument, "oblique_projection: ambient mismatch");
  if (e.dim() + f.dim() != d)
    fail(ErrorKind::DegenerateSum,
         "oblique_projection: dimensions do not sum to the ambient dimension");

  Matrix combined(d);
  for (int j = 0; j < e.dim(); ++j)
    combined.set_col(j, e.basis()[static_cast<size_t>(j)]);
  for (int j = 0; j < f.dim(); ++j)
    combined.set_col(e.dim() + j, f.basis()[static_cast<size_t>(j)]);

  SvdTriple fac = svd(combined);
  const double lo = fac.s[d - 1];
  if (lo <= 0.0 || fac.s[0] / lo >= 1e12)
    fail(ErrorKind::DegenerateSum,
         "oblique_projection: subspaces are numerically non-complementary");

  Vec inv_s(d);
  for (int i = 0; i < d; ++i) inv_s[i] = 1.0 / fac.s[i];
  Matrix inv = fac.v * Matrix::diagonal(inv_s) * fac.u.transpose();

  // Pi = [basis_E | 0] * combined^{-1}: keeps the E-coordinates, kills F.
  Matrix pi(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < e.dim(); ++k)
        s += e.basis()[static_cast<size_t>(k)][i] * inv.at(k, j);
      pi.at(i, j) = s;
    }
  return pi;
}

SphereSectionDistance dist_to_sphere_section(const Vec& u, const Subspace& v) {
  if (std::fabs(u.norm() - 1.0) > 1e-10)
    fail(ErrorKind::Domain, "dist_to_sphere_section: u must be a unit vector");
  Vec p = v.project(u);
  double d_lin = (u - p).norm();
  double pn = p.norm();
  double d_sph;
  if (pn > 0.0) {
    d_sph = (u - p * (1.0 / pn)).norm();
  } else {
    // u orthogonal to V: every unit v in V is at distance sqrt(2).
    d_sph = std::sqrt(2.0);
  }
  return {d_lin, d_sph};
}

}  // namespace lyapgap
