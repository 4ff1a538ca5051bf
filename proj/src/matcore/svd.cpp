#include "matcore/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace lyapgap {

namespace {

constexpr double kJacobiTol = 1e-15;
constexpr int kMaxSweeps = 60;
constexpr double kTieRel = 1e-12;
constexpr double kSignTol = 1e-12;

// Orthonormal basis of span(group columns of v) re-picked so that projections
// of e_1, e_2, ... enter in canonical order. Keeps the factorization valid
// because the matrix acts conformally on a tied singular subspace.
std::vector<Vec> canonical_subspace_basis(const std::vector<Vec>& w, int d) {
  const int k = static_cast<int>(w.size());
  std::vector<Vec> picked;
  picked.reserve(static_cast<size_t>(k));
  for (int i = 0; i < d && static_cast<int>(picked.size()) < k; ++i) {
    // Projection of e_i onto span(w).
    Vec p(d);
    for (const Vec& b : w) {
      double c = b[i];
      p = p + b * c;
    }
    for (const Vec& q : picked) p = p - q * p.dot(q);
    double n = p.norm();
    if (n > 1e-8) picked.push_back(p * (1.0 / n));
  }
  // Pathological near-degenerate projections: fill from the original basis.
  for (int g = 0; g < k && static_cast<int>(picked.size()) < k; ++g) {
    Vec p = w[static_cast<size_t>(g)];
    for (const Vec& q : picked) p = p - q * p.dot(q);
    double n = p.norm();
    if (n > 1e-8) picked.push_back(p * (1.0 / n));
  }
  return picked;
}

}  // namespace

SvdTriple svd(const Matrix& a) {
  const int d = a.dim();
  if (!a.finite()) fail(ErrorKind::InvalidArgument, "svd: entries not finite");

  SvdTriple out{Matrix::identity(d), Vec(d), Matrix::identity(d)};

  const double amax = a.inf_abs();
  if (amax == 0.0) return out;  // zero matrix: u = v = I, s = 0

  // Scale by a power of two so the Gram elements below stay in range; exact.
  const int ex = std::ilogb(amax);
  const double scale = std::ldexp(1.0, -ex);
  Matrix b = a * scale;
  const Matrix as = b;  // scaled input, kept for tie-group reconstruction
  Matrix v = Matrix::identity(d);

  // One-sided Jacobi, fixed row-cyclic sweep order.
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < d; ++i) {
          app += b.at(i, p) * b.at(i, p);
          aqq += b.at(i, q) * b.at(i, q);
          apq += b.at(i, p) * b.at(i, q);
        }
        if (app == 0.0 || aqq == 0.0) continue;
        if (std::fabs(apq) <= kJacobiTol * std::sqrt(app) * std::sqrt(aqq))
          continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::fabs(zeta) > 1e150) {
          t = 0.5 / zeta;
        } else {
          const double w = std::sqrt(1.0 + zeta * zeta);
          t = (zeta >= 0.0) ? 1.0 / (zeta + w) : 1.0 / (zeta - w);
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < d; ++i) {
          const double bp = b.at(i, p), bq = b.at(i, q);
          b.at(i, p) = c * bp - s * bq;
          b.at(i, q) = s * bp + c * bq;
        }
        for (int i = 0; i < d; ++i) {
          const double vp = v.at(i, p), vq = v.at(i, q);
          v.at(i, p) = c * vp - s * vq;
          v.at(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  // Column norms are the (scaled) singular values.
  std::vector<double> sv(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) sv[static_cast<size_t>(j)] = b.col(j).norm();

  std::vector<int> idx(static_cast<size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) {
    return sv[static_cast<size_t>(x)] > sv[static_cast<size_t>(y)];
  });

  std::vector<double> s_sorted(static_cast<size_t>(d));
  std::vector<Vec> ucols(static_cast<size_t>(d), Vec(d));
  std::vector<Vec> vcols(static_cast<size_t>(d), Vec(d));
  for (int j = 0; j < d; ++j) {
    const int src = idx[static_cast<size_t>(j)];
    const double n = sv[static_cast<size_t>(src)];
    s_sorted[static_cast<size_t>(j)] = n;
    vcols[static_cast<size_t>(j)] = v.col(src);
    if (n > 0.0) ucols[static_cast<size_t>(j)] = b.col(src) * (1.0 / n);
  }

  // Tie groups: equal singular values leave the singular basis free; fix it
  // by canonical-order projections so results are reproducible.
  int g0 = 0;
  while (g0 < d) {
    int g1 = g0 + 1;
    while (g1 < d) {
      const double hi = s_sorted[static_cast<size_t>(g1 - 1)];
      const double lo = s_sorted[static_cast<size_t>(g1)];
      if (hi - lo <= kTieRel * std::max(hi, 1e-300)) {
        ++g1;
      } else {
        break;
      }
    }
    const int len = g1 - g0;
    if (len >= 2) {
      std::vector<Vec> group(vcols.begin() + g0, vcols.begin() + g1);
      std::vector<Vec> nb = canonical_subspace_basis(group, d);
      if (static_cast<int>(nb.size()) == len) {
        for (int j = 0; j < len; ++j) {
          vcols[static_cast<size_t>(g0 + j)] = nb[static_cast<size_t>(j)];
          if (s_sorted[static_cast<size_t>(g0 + j)] > 0.0) {
            Vec img = as * nb[static_cast<size_t>(j)];
            // Orthogonalize within the group; images are conformal copies.
            for (int q = g0; q < g0 + j; ++q)
              img = img - ucols[static_cast<size_t>(q)] *
                              img.dot(ucols[static_cast<size_t>(q)]);
            double n = img.norm();
            if (n > 0.0) ucols[static_cast<size_t>(g0 + j)] = img * (1.0 / n);
          }
        }
      }
    }
    g0 = g1;
  }

  // Complete u columns for vanished singular values, canonical order.
  for (int j = 0; j < d; ++j) {
    if (s_sorted[static_cast<size_t>(j)] > 0.0) continue;
    for (int cand = 0; cand < d; ++cand) {
      Vec e = Vec::unit(d, cand);
      for (int q = 0; q < d; ++q) {
        if (q == j || (s_sorted[static_cast<size_t>(q)] <= 0.0 && q > j))
          continue;
        e = e - ucols[static_cast<size_t>(q)] *
                    e.dot(ucols[static_cast<size_t>(q)]);
      }
      double n = e.norm();
      if (n > 1e-8) {
        ucols[static_cast<size_t>(j)] = e * (1.0 / n);
        break;
      }
    }
  }

  // Sign convention on right singular vectors.
  for (int j = 0; j < d; ++j) {
    Vec& vj = vcols[static_cast<size_t>(j)];
    for (int i = 0; i < d; ++i) {
      if (std::fabs(vj[i]) > kSignTol) {
        if (vj[i] < 0.0) {
          vj = vj * -1.0;
          ucols[static_cast<size_t>(j)] = ucols[static_cast<size_t>(j)] * -1.0;
        }
        break;
      }
    }
  }

  for (int j = 0; j < d; ++j) {
    out.s[j] = s_sorted[static_cast<size_t>(j)] / scale;
    out.u.set_col(j, ucols[static_cast<size_t>(j)]);
    out.v.set_col(j, vcols[static_cast<size_t>(j)]);
  }
  return out;
}

double operator_norm(const Matrix& a) { return svd(a).s[0]; }

double condition_number(const Matrix& a) {
  SvdTriple f = svd(a);
  const double lo = f.s[a.dim() - 1];
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return f.s[0] / lo;
}

Matrix inverse(const Matrix& a, double cond_limit) {
  SvdTriple f = svd(a);
  const int d = a.dim();
  const double lo = f.s[d - 1];
  if (lo <= 0.0 || f.s[0] / lo >= cond_limit)
    fail(ErrorKind::Singular, "inverse: matrix numerically singular");
  Vec inv_s(d);
  for (int i = 0; i < d; ++i) inv_s[i] = 1.0 / f.s[i];
  return f.v * Matrix::diagonal(inv_s) * f.u.transpose();
}

}  // namespace lyapgap
