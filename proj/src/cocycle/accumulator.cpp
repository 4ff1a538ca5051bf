#include "cocycle/accumulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "error.hpp"

namespace lyapgap {

namespace {

constexpr double kOrthTol = 1e-14;
constexpr int kMaxSweeps = 40;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ProductAccumulator::ProductAccumulator(int dim, int renorm_period)
    : dim_(dim), renorm_period_(renorm_period), carrier_(Matrix::identity(dim)) {
  if (renorm_period < 1)
    fail(ErrorKind::InvalidArgument, "accumulator: renorm period must be >= 1");
  log_scales_.fill(0.0);
}

void ProductAccumulator::advance(const Matrix& m) {
  if (m.dim() != dim_)
    fail(ErrorKind::InvalidArgument, "accumulator: dimension mismatch");
  if (!m.finite())
    fail(ErrorKind::InvalidArgument, "accumulator: non-finite factor");
  carrier_ = m * carrier_;
  if (!carrier_.finite())
    fail(ErrorKind::Accumulation,
         "accumulator: carrier overflowed; renorm period too long");
  ++step_;
  if (++since_renorm_ >= renorm_period_) {
    fold_column_norms();
    diagonalize();
    since_renorm_ = 0;
  }
}

void ProductAccumulator::fold_column_norms() {
  for (int j = 0; j < dim_; ++j) {
    Vec c = carrier_.col(j);
    double n = c.norm();
    if (n == 0.0) {
      log_scales_[static_cast<size_t>(j)] = -kInf;
      continue;
    }
    if (!std::isfinite(n))
      fail(ErrorKind::Accumulation, "accumulator: column norm overflow");
    log_scales_[static_cast<size_t>(j)] += std::log(n);
    carrier_.set_col(j, c * (1.0 / n));
  }
}

// One-sided Jacobi on (unit column, log norm) pairs. The rotation angle
// depends on the Gram matrix only up to scale, so it can be formed from the
// log-norm difference r = tau_q - tau_p without ever exponentiating the
// accumulated scales. For |r| beyond 40 the rotation degenerates to a
// Gram-Schmidt update of the small column, which is exact at double
// precision.
void ProductAccumulator::diagonalize() {
  const int d = dim_;
  std::vector<Vec> w(static_cast<size_t>(d), Vec(d));
  std::vector<double> tau(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) {
    w[static_cast<size_t>(j)] = carrier_.col(j);
    tau[static_cast<size_t>(j)] = log_scales_[static_cast<size_t>(j)];
  }

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        double tp = tau[static_cast<size_t>(p)], tq = tau[static_cast<size_t>(q)];
        if (tp == -kInf || tq == -kInf) continue;
        Vec& wp = w[static_cast<size_t>(p)];
        Vec& wq = w[static_cast<size_t>(q)];
        double alpha = std::clamp(wp.dot(wq), -1.0, 1.0);
        if (std::fabs(alpha) <= kOrthTol) continue;
        rotated = true;
        const double r = tq - tp;

        auto renorm_into = [&](Vec& dst, const Vec& val, double& t) {
          double n = val.norm();
          if (n == 0.0) {
            dst = Vec(d);
            t = -kInf;
          } else {
            dst = val * (1.0 / n);
            t += std::log(n);
          }
        };

        if (r <= -40.0) {
          // p dominates: orthogonalize the small column against it.
          Vec nq = wq - wp * alpha;
          renorm_into(wq, nq, tau[static_cast<size_t>(q)]);
        } else if (r >= 40.0) {
          Vec np = wp - wq * alpha;
          renorm_into(wp, np, tau[static_cast<size_t>(p)]);
        } else {
          const double zeta = std::sinh(r) / alpha;
          double t;
          if (std::fabs(zeta) > 1e150) {
            t = 0.5 / zeta;
          } else {
            const double u = std::sqrt(1.0 + zeta * zeta);
            t = (zeta >= 0.0) ? 1.0 / (zeta + u) : 1.0 / (zeta - u);
          }
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = c * t;
          const double xp = s * std::exp(r);    // scaled coupling into column p
          const double xq = s * std::exp(-r);   // and into column q
          Vec np = wp * c - wq * xp;
          Vec nq = wp * xq + wq * c;
          renorm_into(wp, np, tau[static_cast<size_t>(p)]);
          renorm_into(wq, nq, tau[static_cast<size_t>(q)]);
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<int> idx(static_cast<size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return tau[static_cast<size_t>(a)] > tau[static_cast<size_t>(b)];
  });
  Matrix nw(d);
  std::array<double, kMaxDim> nl{};
  for (int j = 0; j < d; ++j) {
    nw.set_col(j, w[static_cast<size_t>(idx[static_cast<size_t>(j)])]);
    nl[static_cast<size_t>(j)] = tau[static_cast<size_t>(idx[static_cast<size_t>(j)])];
  }
  carrier_ = nw;
  log_scales_ = nl;
}

Vec ProductAccumulator::log_singular_values() const {
  ProductAccumulator copy = *this;
  copy.fold_column_norms();
  copy.diagonalize();
  Vec out(dim_);
  for (int j = 0; j < dim_; ++j) out[j] = copy.log_scales_[static_cast<size_t>(j)];
  return out;
}

Matrix ProductAccumulator::left_frame() const {
  ProductAccumulator copy = *this;
  copy.fold_column_norms();
  copy.diagonalize();
  return copy.carrier_;
}

}  // namespace lyapgap
