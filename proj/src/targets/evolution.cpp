#include "targets/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cocycle/accumulator.hpp"
#include "matcore/svd.hpp"

namespace lyapgap {

namespace {

constexpr double kCondLimit = 1e12;

void validate_block(const std::vector<Matrix>& block, int* dim_out) {
  if (block.empty())
    fail(ErrorKind::InvalidArgument, "block: empty factor list");
  const int d = block.front().dim();
  for (size_t i = 0; i < block.size(); ++i) {
    if (block[i].dim() != d)
      fail(ErrorKind::InvalidArgument, "block: dimension mismatch");
    if (!block[i].finite())
      fail(ErrorKind::InvalidArgument, "block: non-finite factor");
    if (condition_number(block[i]) >= kCondLimit)
      fail(ErrorKind::Singular,
           "block: factor " + std::to_string(i + 1) + " numerically singular");
  }
  *dim_out = d;
}

}  // namespace

Matrix nonsingular_init(const Matrix& a, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    fail(ErrorKind::Precondition, "nonsingular_init: eps must lie in (0,1)");
  SvdTriple f = svd(a);
  if (f.s[0] > 1.0 + 1e-12)
    fail(ErrorKind::Precondition, "nonsingular_init: norm exceeds 1");
  Vec s(a.dim());
  for (int i = 0; i < a.dim(); ++i) s[i] = (1.0 - eps) * f.s[i] + eps * 0.5;
  return f.u * Matrix::diagonal(s) * f.v.transpose();
}

Subspace BlockEvolution::fast_span(int n, int j) const {
  const auto& row = dirs[static_cast<size_t>(n - 1)];
  return Subspace::from_spanning(
      dim, std::vector<Vec>(row.begin(), row.begin() + j));
}

Subspace BlockEvolution::slow_span(int n, int j) const {
  const auto& row = dirs[static_cast<size_t>(n - 1)];
  return Subspace::from_spanning(
      dim, std::vector<Vec>(row.begin() + j, row.end()));
}

BlockEvolution evolve_block(const std::vector<Matrix>& block) {
  BlockEvolution ev;
  validate_block(block, &ev.dim);
  const int d = ev.dim;
  const size_t len = block.size();

  // Right singular vectors of the product from the transposed-reversed
  // accumulator: (M_len ... M_1)^T = M_1^T ... M_len^T, whose left frame is
  // the right frame of the product. Stays stable for any block length.
  ProductAccumulator rev(d, 8);
  for (size_t i = len; i-- > 0;) rev.advance(block[i].transpose());
  Matrix v = rev.left_frame();

  ProductAccumulator fwd(d, 8);
  for (size_t i = 0; i < len; ++i) fwd.advance(block[i]);
  ev.log_singular = fwd.log_singular_values();

  ev.right_singular.reserve(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    Vec vi = v.col(i);
    for (int r = 0; r < d; ++r) {
      if (std::fabs(vi[r]) > 1e-12) {
        if (vi[r] < 0.0) vi = vi * -1.0;
        break;
      }
    }
    ev.right_singular.push_back(vi);
  }

  // Evolve directions with per-step renormalization.
  std::vector<Vec> cur = ev.right_singular;
  ev.dirs.reserve(len);
  for (size_t n = 0; n < len; ++n) {
    for (int i = 0; i < d; ++i) {
      Vec img = block[n] * cur[static_cast<size_t>(i)];
      double nn = img.norm();
      if (!(nn > 0.0) || !std::isfinite(nn))
        fail(ErrorKind::Singular, "block: image of singular vector vanished");
      cur[static_cast<size_t>(i)] = img * (1.0 / nn);
    }
    ev.dirs.push_back(cur);
  }
  return ev;
}

Vec block_log_svd(const std::vector<Matrix>& block) {
  int d = 0;
  validate_block(block, &d);
  ProductAccumulator acc(d, 8);
  for (const Matrix& m : block) acc.advance(m);
  return acc.log_singular_values();
}

std::vector<EvolvedSplit> singular_vector_evolution(
    const std::vector<Matrix>& block, int j) {
  BlockEvolution ev = evolve_block(block);
  if (j < 1 || j >= ev.dim)
    fail(ErrorKind::InvalidArgument, "singular_vector_evolution: bad index j");
  std::vector<EvolvedSplit> out;
  out.reserve(block.size());
  for (int n = 1; n <= static_cast<int>(block.size()); ++n) {
    Subspace e = ev.fast_span(n, j);
    Subspace f = ev.slow_span(n, j);
    double delta = sphere_distance(e, f);
    out.push_back({std::move(e), std::move(f), delta});
  }
  return out;
}

double BlockClassification::min_delta() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& row : deltas)
    for (double x : row) m = std::min(m, x);
  return m;
}

double BlockClassification::row_min(int jj) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& row : deltas) m = std::min(m, row[static_cast<size_t>(jj - 1)]);
  return m;
}

BlockClassification classify_block(const std::vector<Matrix>& block,
                                   double eta) {
  if (!(eta >= 0.0))
    fail(ErrorKind::InvalidArgument, "classify_block: eta must be >= 0");
  BlockEvolution ev = evolve_block(block);
  const int d = ev.dim;

  BlockClassification c;
  c.eta = eta;
  c.deltas.assign(block.size(), std::vector<double>(static_cast<size_t>(d - 1)));
  for (int n = 1; n <= static_cast<int>(block.size()); ++n)
    for (int j = 1; j < d; ++j)
      c.deltas[static_cast<size_t>(n - 1)][static_cast<size_t>(j - 1)] =
          sphere_distance(ev.fast_span(n, j), ev.slow_span(n, j));

  c.spread = true;
  for (int n = 1; n <= static_cast<int>(block.size()) && c.spread; ++n)
    for (int j = 1; j < d; ++j) {
      double delta = c.deltas[static_cast<size_t>(n - 1)][static_cast<size_t>(j - 1)];
      if (delta <= eta) {
        c.spread = false;
        c.n = n;
        c.j = j;
        c.delta = delta;
        break;
      }
    }
  return c;
}

}  // namespace lyapgap
