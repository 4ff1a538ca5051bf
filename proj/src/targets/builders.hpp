#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "targets/evolution.hpp"

namespace lyapgap {

struct GapCertificate {
  int j = 1;
  int k = 2;
  double log_ratio = 0.0;  // log of s_j / s_k of the assembled target product

  double ratio() const;
};

enum class PerturbationKind { Unchanged, LeftFactor, RightFactor };

struct TargetEntry {
  PerturbationKind kind = PerturbationKind::Unchanged;
  Matrix r;  // the near-identity factor; meaningful unless Unchanged
};

// Sub-range [first, last] (1-based within the source block) of replacement
// matrices certified to carry a (j, k)-gap. Every builder revalidates the
// certificate with an independent SVD of the assembled product and fails
// loudly when it cannot.
struct TargetBlock {
  int dim = 0;
  uint64_t first = 1;
  uint64_t last = 1;
  std::vector<Matrix> matrices;
  std::vector<TargetEntry> perturbations;
  GapCertificate certified;

  size_t length() const { return matrices.size(); }
};

// Spread construction: every factor gets the left boost
// R_n = I + (eps * eta / 8) * P_{E_{j,n} || F_{j,n}}, which multiplies the
// top j singular values by (1 + eps*eta/8) per step, exactly. Preconditions:
// delta_{n,j} >= eta for all n (spread in row j) and enough length for the
// boost to reach gamma; either failure raises Precondition.
TargetBlock build_spread_target(const std::vector<Matrix>& block, int j,
                                double eps, double eta, double gamma);

// Orthogonal images of orthogonal unit vectors certify extremal gaps:
// returns eta = angle(Bu, Bv); the caller's guarantee is
// s_1(B)/s_d(B) >= 1/eta. Precondition: u and v orthogonal to 1e-10 and B
// invertible.
double aligned_gap_certificate(const Matrix& b, const Vec& u, const Vec& v);

// (1, d)-gap target for any dimension: spread branch boosts, nearly-aligned
// branch certifies an unchanged prefix.
TargetBlock build_extremal_target(const std::vector<Matrix>& block, double eps,
                                  double gamma);

// Rotation in the plane of e and f sending e to f, identity on the
// orthogonal complement. This is the minimizer of ||R - I|| among
// orthogonal maps with R e = f, and ||R - I|| = ||f - e||.
Matrix rotation_mapping(const Vec& e, const Vec& f);

enum class SplitGapSite { Whole, Left, Right, None };

// Checks B, B_1 = M_n...M_1, B_2 = M_len...M_{n+1} for a (1,2)-gap >= gamma
// in that order. None can only come back when the angle hypothesis of the
// split lemma was violated. d = 3 only.
SplitGapSite split_gap_locator(const std::vector<Matrix>& block, int n,
                               double gamma);

// 3x3 splice: when delta_{n,2} < min(gamma^-9, eps/4) either a sub-block
// already has the (1,2)-gap or rotating e onto f at step n creates one.
TargetBlock build_3x3_aligned_target(const std::vector<Matrix>& block, int n,
                                     double eps, double gamma);

// Full three-case dispatch for 3x3 blocks, certified (1,2)-gap >= gamma.
TargetBlock build_3x3_target(const std::vector<Matrix>& block, double eps,
                             double gamma);

// Complementarity route: reverse and invert the block, build a (1,2)-target,
// map it back; certified (2,3)-gap >= gamma.
TargetBlock build_3x3_target_23(const std::vector<Matrix>& block, double eps,
                                double gamma);

std::string target_to_json(const TargetBlock& t);
TargetBlock target_from_json(const std::string& text);

}  // namespace lyapgap
