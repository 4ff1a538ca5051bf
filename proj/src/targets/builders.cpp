#include "targets/builders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "cocycle/accumulator.hpp"
#include "matcore/svd.hpp"

namespace lyapgap {

namespace {

constexpr double kNearIdentitySlack = 1e-10;
constexpr double kCertSlack = 1e-9;

double log_gap(const Vec& lsv, int j, int k) {
  return lsv[j - 1] - lsv[k - 1];
}

void check_near_identity(const Matrix& r, const Matrix& r_inv, double eps,
                         const char* who) {
  if (operator_norm(r - Matrix::identity(r.dim())) > eps / 4.0 + kNearIdentitySlack ||
      operator_norm(r_inv - Matrix::identity(r.dim())) > eps / 4.0 + kNearIdentitySlack)
    fail(ErrorKind::Internal,
         std::string(who) + ": near-identity bound violated");
}

// Certificate revalidation shared by every builder.
void certify(TargetBlock& t, double gamma, const char* who,
             ErrorKind on_short = ErrorKind::Internal) {
  Vec lsv = block_log_svd(t.matrices);
  t.certified.log_ratio = log_gap(lsv, t.certified.j, t.certified.k);
  if (!(t.certified.log_ratio >= std::log(gamma) - kCertSlack))
    fail(on_short, std::string(who) + ": certified gap fell short of gamma");
}

// Unit pair (e, f) attaining sphere_distance(E, F), from the top principal
// vectors of the basis overlap matrix.
struct ClosestPair {
  Vec e, f;
  double dist;
};

ClosestPair closest_unit_pair(const Subspace& e, const Subspace& f) {
  const int d = e.ambient_dim();
  const int p = e.dim(), q = f.dim();
  const int m = std::max(kMinDim, std::max(p, q));
  Matrix overlap(m);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j)
      overlap.at(i, j) = e.basis()[static_cast<size_t>(i)].dot(
          f.basis()[static_cast<size_t>(j)]);
  SvdTriple fac = svd(overlap);
  Vec ve(d), vf(d);
  for (int i = 0; i < p; ++i)
    ve = ve + e.basis()[static_cast<size_t>(i)] * fac.u.at(i, 0);
  for (int j = 0; j < q; ++j)
    vf = vf + f.basis()[static_cast<size_t>(j)] * fac.v.at(j, 0);
  ve = ve.normalized();
  vf = vf.normalized();
  if (ve.dot(vf) < 0.0) vf = vf * -1.0;
  return {ve, vf, (ve - vf).norm()};
}

TargetBlock unchanged_sub_block(const std::vector<Matrix>& block,
                                uint64_t first, uint64_t last, int j, int k) {
  TargetBlock t;
  t.dim = block.front().dim();
  t.first = first;
  t.last = last;
  t.matrices.assign(block.begin() + static_cast<long>(first - 1),
                    block.begin() + static_cast<long>(last));
  t.perturbations.assign(t.matrices.size(), TargetEntry{});
  t.certified.j = j;
  t.certified.k = k;
  return t;
}

}  // namespace

double GapCertificate::ratio() const {
  return std::exp(std::min(log_ratio, 709.0));
}

Matrix rotation_mapping(const Vec& e, const Vec& f) {
  const int d = e.dim();
  const double c = std::clamp(e.dot(f), -1.0, 1.0);
  Vec w = f - e * c;
  const double sn = w.norm();
  if (sn < 1e-15) return Matrix::identity(d);
  w = w * (1.0 / sn);
  Matrix r = Matrix::identity(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      r.at(i, j) += (c - 1.0) * (e[i] * e[j] + w[i] * w[j]) +
                    sn * (w[i] * e[j] - e[i] * w[j]);
  return r;
}

TargetBlock build_spread_target(const std::vector<Matrix>& block, int j,
                                double eps, double eta, double gamma) {
  if (!(eps > 0.0) || !(eps < 1.0))
    fail(ErrorKind::Precondition, "spread target: eps must lie in (0,1)");
  if (!(eta > 0.0))
    fail(ErrorKind::Precondition, "spread target: eta must be positive");
  if (!(gamma >= 1.0))
    fail(ErrorKind::Precondition, "spread target: gamma must be >= 1");

  BlockEvolution ev = evolve_block(block);
  const int d = ev.dim;
  if (j < 1 || j >= d)
    fail(ErrorKind::InvalidArgument, "spread target: bad index j");

  const size_t len = block.size();
  const double boost = eps * eta / 8.0;

  TargetBlock t;
  t.dim = d;
  t.first = 1;
  t.last = len;
  t.matrices.reserve(len);
  t.perturbations.reserve(len);

  for (int n = 1; n <= static_cast<int>(len); ++n) {
    Subspace e = ev.fast_span(n, j);
    Subspace f = ev.slow_span(n, j);
    if (!(sphere_distance(e, f) >= eta))
      fail(ErrorKind::Precondition,
           "spread target: block is not eta-spread at step " +
               std::to_string(n));
    Matrix pi = oblique_projection(e, f);
    Matrix r = Matrix::identity(d) + pi * boost;
    Matrix r_inv = Matrix::identity(d) - pi * (boost / (1.0 + boost));
    check_near_identity(r, r_inv, eps, "spread target");
    t.matrices.push_back(r * block[static_cast<size_t>(n - 1)]);
    t.perturbations.push_back({PerturbationKind::LeftFactor, r});
  }

  t.certified.j = j;
  t.certified.k = j + 1;
  certify(t, gamma, "spread target", ErrorKind::Precondition);

  // The construction is exact: top j log singular values shift by
  // len * log(1 + boost), the rest stay. Anything else is a bug.
  Vec tgt = block_log_svd(t.matrices);
  const double shift = static_cast<double>(len) * std::log1p(boost);
  for (int i = 0; i < d; ++i) {
    double expected = ev.log_singular[i] + (i < j ? shift : 0.0);
    if (std::fabs(tgt[i] - expected) >
        1e-7 * std::max(1.0, std::fabs(expected)))
      fail(ErrorKind::Internal, "spread target: scaling relation violated");
  }
  return t;
}

double aligned_gap_certificate(const Matrix& b, const Vec& u, const Vec& v) {
  if (std::fabs(u.normalized().dot(v.normalized())) > 1e-10)
    fail(ErrorKind::Precondition, "gap certificate: u and v not orthogonal");
  if (condition_number(b) >= 1e12)
    fail(ErrorKind::Precondition, "gap certificate: matrix singular");
  return angle(b * u, b * v);
}

TargetBlock build_extremal_target(const std::vector<Matrix>& block, double eps,
                                  double gamma) {
  if (!(gamma >= 1.0))
    fail(ErrorKind::Precondition, "extremal target: gamma must be >= 1");
  const int d = block.front().dim();
  BlockClassification c = classify_block(block, 1.0 / gamma);
  if (c.spread) {
    // Boost with the block's own spread margin in row 1; at least 1/gamma.
    double eta = std::max(1.0 / gamma, c.row_min(1));
    TargetBlock t = build_spread_target(block, 1, eps, eta, gamma);
    t.certified.j = 1;
    t.certified.k = d;
    certify(t, gamma, "extremal target", ErrorKind::Precondition);
    return t;
  }
  // Nearly aligned at (c.n, c.j): the unchanged prefix already carries the
  // extremal gap, by the orthogonal-image certificate.
  TargetBlock t = unchanged_sub_block(block, 1, static_cast<uint64_t>(c.n), 1, d);
  certify(t, gamma, "extremal target (aligned prefix)");
  return t;
}

SplitGapSite split_gap_locator(const std::vector<Matrix>& block, int n,
                               double gamma) {
  const int d = block.front().dim();
  if (d != 3) fail(ErrorKind::InvalidArgument, "split locator: d must be 3");
  if (n < 1 || n > static_cast<int>(block.size()))
    fail(ErrorKind::InvalidArgument, "split locator: split out of range");
  const double lg = std::log(gamma);

  if (log_gap(block_log_svd(block), 1, 2) >= lg) return SplitGapSite::Whole;
  std::vector<Matrix> left(block.begin(), block.begin() + n);
  if (log_gap(block_log_svd(left), 1, 2) >= lg) return SplitGapSite::Left;
  if (n < static_cast<int>(block.size())) {
    std::vector<Matrix> right(block.begin() + n, block.end());
    if (log_gap(block_log_svd(right), 1, 2) >= lg) return SplitGapSite::Right;
  }
  return SplitGapSite::None;
}

TargetBlock build_3x3_aligned_target(const std::vector<Matrix>& block, int n,
                                     double eps, double gamma) {
  const int d = block.front().dim();
  if (d != 3) fail(ErrorKind::InvalidArgument, "3x3 splice: d must be 3");
  if (block.size() < 2)
    fail(ErrorKind::Precondition, "3x3 splice: block too short");
  if (n < 1 || n > static_cast<int>(block.size()))
    fail(ErrorKind::InvalidArgument, "3x3 splice: step out of range");
  if (!(eps > 0.0) || !(eps < 1.0))
    fail(ErrorKind::Precondition, "3x3 splice: eps must lie in (0,1)");

  const double threshold = std::min(std::pow(gamma, -9.0), eps / 4.0);
  BlockEvolution ev = evolve_block(block);
  Subspace e2 = ev.fast_span(n, 2);
  Subspace f2 = ev.slow_span(n, 2);
  ClosestPair pair = closest_unit_pair(e2, f2);
  if (!(pair.dist < threshold))
    fail(ErrorKind::Precondition,
         "3x3 splice: delta_{n,2} not below min(gamma^-9, eps/4)");

  const size_t len = block.size();
  const double lg = std::log(gamma);
  if (log_gap(block_log_svd(block), 1, 2) >= lg) {
    TargetBlock t = unchanged_sub_block(block, 1, len, 1, 2);
    certify(t, gamma, "3x3 splice (whole)");
    return t;
  }
  {
    std::vector<Matrix> left(block.begin(), block.begin() + n);
    if (log_gap(block_log_svd(left), 1, 2) >= lg) {
      TargetBlock t = unchanged_sub_block(block, 1, static_cast<uint64_t>(n), 1, 2);
      certify(t, gamma, "3x3 splice (left)");
      return t;
    }
  }
  if (n < static_cast<int>(len)) {
    std::vector<Matrix> right(block.begin() + n, block.end());
    if (log_gap(block_log_svd(right), 1, 2) >= lg) {
      TargetBlock t = unchanged_sub_block(block, static_cast<uint64_t>(n + 1), len, 1, 2);
      certify(t, gamma, "3x3 splice (right)");
      return t;
    }
  }

  // Splice: rotate e onto f at step n, leave everything else alone.
  Matrix r = rotation_mapping(pair.e, pair.f);
  check_near_identity(r, r.transpose(), eps, "3x3 splice");

  TargetBlock t = unchanged_sub_block(block, 1, len, 1, 2);
  t.matrices[static_cast<size_t>(n - 1)] = r * block[static_cast<size_t>(n - 1)];
  t.perturbations[static_cast<size_t>(n - 1)] = {PerturbationKind::LeftFactor, r};
  certify(t, gamma, "3x3 splice");
  return t;
}

TargetBlock build_3x3_target(const std::vector<Matrix>& block, double eps,
                             double gamma) {
  const int d = block.front().dim();
  if (d != 3) fail(ErrorKind::InvalidArgument, "3x3 target: d must be 3");
  if (!(gamma > 2.0))
    fail(ErrorKind::Precondition, "3x3 target: gamma must exceed 2");
  const double eta = std::min(std::pow(gamma, -9.0), eps / 4.0);

  BlockClassification c = classify_block(block, eta * eta);
  if (c.spread) {
    // Case 1. Boost with the observed spread margin of row 1; the paper's
    // worst-case eta^2 would force astronomically long blocks.
    double margin = std::max(eta * eta, c.row_min(1));
    return build_spread_target(block, 1, eps, margin, gamma);
  }

  // Look for case 2: some delta_{n,1} <= eta^2 while every delta_{n,2} >= eta.
  bool row2_clear = true;
  for (const auto& row : c.deltas)
    if (row[1] < eta) {
      row2_clear = false;
      break;
    }
  if (row2_clear) {
    int split = 0;
    for (size_t i = 0; i < c.deltas.size(); ++i)
      if (c.deltas[i][0] <= eta * eta) {
        split = static_cast<int>(i + 1);
        break;
      }
    if (split == 0)
      fail(ErrorKind::Internal, "3x3 target: classification inconsistent");

    BlockEvolution ev = evolve_block(block);
    const Vec& v1 = ev.dirs[static_cast<size_t>(split - 1)][0];
    const Vec& v2 = ev.dirs[static_cast<size_t>(split - 1)][1];
    if (!(angle_min_sign(v1, v2) < std::pow(gamma, -5.0)))
      fail(ErrorKind::Internal,
           "3x3 target: top singular directions not close despite small "
           "delta_{n,1}");
    SplitGapSite site = split_gap_locator(block, split, gamma);
    uint64_t len = block.size();
    TargetBlock t;
    switch (site) {
      case SplitGapSite::Whole:
        t = unchanged_sub_block(block, 1, len, 1, 2);
        break;
      case SplitGapSite::Left:
        t = unchanged_sub_block(block, 1, static_cast<uint64_t>(split), 1, 2);
        break;
      case SplitGapSite::Right:
        t = unchanged_sub_block(block, static_cast<uint64_t>(split + 1), len, 1, 2);
        break;
      case SplitGapSite::None:
        fail(ErrorKind::Internal, "3x3 target: split lemma produced no site");
    }
    certify(t, gamma, "3x3 target (split)");
    return t;
  }

  // Case 3: some delta_{n,2} < eta; splice at the first such step.
  for (size_t i = 0; i < c.deltas.size(); ++i)
    if (c.deltas[i][1] < eta)
      return build_3x3_aligned_target(block, static_cast<int>(i + 1), eps, gamma);
  fail(ErrorKind::Internal, "3x3 target: dispatch fell through");
}

TargetBlock build_3x3_target_23(const std::vector<Matrix>& block, double eps,
                                double gamma) {
  const int d = block.front().dim();
  if (d != 3) fail(ErrorKind::InvalidArgument, "3x3 target: d must be 3");
  const size_t len = block.size();

  // Reverse and invert, build a (1,2)-target, map back through inverses.
  std::vector<Matrix> tilde;
  tilde.reserve(len);
  for (size_t l = 1; l <= len; ++l) tilde.push_back(inverse(block[len - l]));

  TargetBlock tt = build_3x3_target(tilde, eps, gamma);

  TargetBlock t;
  t.dim = d;
  const uint64_t n_total = len + 1;
  t.first = n_total - tt.last;
  t.last = n_total - tt.first;
  const size_t tlen = tt.matrices.size();
  t.matrices.resize(tlen, Matrix(d));
  t.perturbations.resize(tlen);
  for (size_t idx = 0; idx < tlen; ++idx) {
    // Entry l = t.first + idx corresponds to tilde index n_total - l.
    const uint64_t l = t.first + idx;
    const size_t tidx = static_cast<size_t>(n_total - l - tt.first);
    t.matrices[idx] = inverse(tt.matrices[tidx]);
    const TargetEntry& src = tt.perturbations[tidx];
    if (src.kind == PerturbationKind::Unchanged) {
      t.perturbations[idx] = TargetEntry{};
    } else {
      // (R Mt)^{-1} = Mt^{-1} R^{-1} = M R^{-1}: a right near-identity factor.
      Matrix r_inv = inverse(src.r);
      check_near_identity(r_inv, src.r, eps, "3x3 complementarity");
      t.perturbations[idx] = {src.kind == PerturbationKind::LeftFactor
                                  ? PerturbationKind::RightFactor
                                  : PerturbationKind::LeftFactor,
                              r_inv};
    }
  }
  t.certified.j = 2;
  t.certified.k = 3;
  certify(t, gamma, "3x3 complementarity target");
  return t;
}

std::string target_to_json(const TargetBlock& t) {
  nlohmann::json j;
  j["dim"] = t.dim;
  j["first"] = t.first;
  j["last"] = t.last;
  auto mat_to_array = [](const Matrix& m) {
    std::vector<double> flat;
    for (int r = 0; r < m.dim(); ++r)
      for (int c = 0; c < m.dim(); ++c) flat.push_back(m.at(r, c));
    return flat;
  };
  for (const Matrix& m : t.matrices) j["matrices"].push_back(mat_to_array(m));
  for (const TargetEntry& e : t.perturbations) {
    nlohmann::json p;
    p["kind"] = e.kind == PerturbationKind::Unchanged     ? "unchanged"
                : e.kind == PerturbationKind::LeftFactor  ? "left"
                                                          : "right";
    if (e.kind != PerturbationKind::Unchanged) p["r"] = mat_to_array(e.r);
    j["perturbations"].push_back(p);
  }
  j["certificate"] = {{"j", t.certified.j},
                      {"k", t.certified.k},
                      {"log_ratio", t.certified.log_ratio}};
  return j.dump();
}

TargetBlock target_from_json(const std::string& text) {
  TargetBlock t;
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    t.dim = j.at("dim").get<int>();
    t.first = j.at("first").get<uint64_t>();
    t.last = j.at("last").get<uint64_t>();
    auto mat_from_array = [&](const nlohmann::json& a) {
      Matrix m(t.dim);
      size_t i = 0;
      for (int r = 0; r < t.dim; ++r)
        for (int c = 0; c < t.dim; ++c) m.at(r, c) = a.at(i++).get<double>();
      return m;
    };
    for (const auto& a : j.at("matrices")) t.matrices.push_back(mat_from_array(a));
    for (const auto& p : j.at("perturbations")) {
      TargetEntry e;
      std::string kind = p.at("kind").get<std::string>();
      if (kind == "left")
        e.kind = PerturbationKind::LeftFactor;
      else if (kind == "right")
        e.kind = PerturbationKind::RightFactor;
      else
        e.kind = PerturbationKind::Unchanged;
      if (e.kind != PerturbationKind::Unchanged) e.r = mat_from_array(p.at("r"));
      t.perturbations.push_back(e);
    }
    t.certified.j = j.at("certificate").at("j").get<int>();
    t.certified.k = j.at("certificate").at("k").get<int>();
    t.certified.log_ratio = j.at("certificate").at("log_ratio").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("target json: ") + e.what());
  }
  return t;
}

}  // namespace lyapgap
