#include "targets/continuity.hpp"

#include <cmath>
#include <limits>

#include "cocycle/philox.hpp"
#include "matcore/svd.hpp"
#include "targets/evolution.hpp"

namespace lyapgap {

ContinuityReport target_continuity_check(const TargetBlock& target, double eps,
                                         int n_block, uint64_t trials,
                                         uint64_t seed, uint64_t stream) {
  if (!(eps > 0.0) || !(eps < 1.0))
    fail(ErrorKind::Precondition, "continuity check: eps must lie in (0,1)");
  if (n_block < 2)
    fail(ErrorKind::Precondition, "continuity check: N must be >= 2");
  const int d = target.dim;
  for (const Matrix& m : target.matrices) {
    SvdTriple f = svd(m);
    if (f.s[0] > 1.0 - eps / 4.0 + 1e-12)
      fail(ErrorKind::Precondition,
           "continuity check: target norm exceeds 1 - eps/4");
    if (f.s[d - 1] < eps / 4.0 - 1e-12)
      fail(ErrorKind::Precondition,
           "continuity check: target smallest singular value below eps/4");
  }

  const double radius =
      std::pow(eps / 4.0, n_block) / (3.0 * d * n_block);
  const size_t len = target.matrices.size();

  ContinuityReport rep;
  rep.trials = trials;
  rep.log_ball_radius = std::log(radius);
  rep.log_hit_prob =
      static_cast<double>(d * d) * static_cast<double>(len) *
      std::log(radius / eps);
  rep.log_p_paper =
      static_cast<double>(d) * d * n_block * n_block * std::log(eps / 4.0) -
      static_cast<double>(d) * d * n_block *
          std::log(3.0 * d * n_block);

  Vec base = block_log_svd(target.matrices);
  const double base_gap = base[target.certified.j - 1] - base[target.certified.k - 1];

  double min_factor = std::numeric_limits<double>::infinity();
  std::vector<Matrix> perturbed(len, Matrix(d));
  for (uint64_t t = 1; t <= trials; ++t) {
    for (size_t i = 0; i < len; ++i) {
      Matrix m = target.matrices[i];
      uint32_t idx = 0;
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          m.at(r, c) += radius * uniform_pm1(seed, stream,
                                             t * len + i + 1, idx++);
      perturbed[i] = m;
    }
    Vec lsv = block_log_svd(perturbed);
    double gap = lsv[target.certified.j - 1] - lsv[target.certified.k - 1];
    min_factor = std::min(min_factor, std::exp(gap - base_gap));
  }
  rep.min_factor = min_factor;
  return rep;
}

}  // namespace lyapgap
