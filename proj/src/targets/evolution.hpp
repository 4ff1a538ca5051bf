#pragma once

#include <vector>

#include "matcore/matrix.hpp"
#include "matcore/subspace.hpp"

namespace lyapgap {

// Pulls a matrix of norm <= 1 to a uniformly non-singular one:
// A' = U((1-eps) diag(s) + (eps/2) I) V^T, so that ||A' - A|| <= eps/2,
// ||A'|| <= max(1/2, 1 - eps/2) and s_d(A') >= eps/2. Deterministic through
// the fixed SVD convention.
Matrix nonsingular_init(const Matrix& a, double eps);

// Evolution of the singular frame of a block product B = M_len ... M_1:
// directions of the images M_n ... M_1 v_i of B's right singular vectors.
struct BlockEvolution {
  int dim = 0;
  std::vector<Vec> right_singular;  // v_1..v_d of B
  Vec log_singular;                 // log s_1 >= ... >= log s_d of B
  // dirs[n-1][i]: unit direction of M_n ... M_1 v_{i+1}, n = 1..len
  std::vector<std::vector<Vec>> dirs;

  Subspace fast_span(int n, int j) const;  // E_{j,n}
  Subspace slow_span(int n, int j) const;  // F_{j,n}
};

// Singular error if any factor has condition number >= 1e12.
BlockEvolution evolve_block(const std::vector<Matrix>& block);

// Log singular values (descending) of M_len ... M_1, stable for any length.
Vec block_log_svd(const std::vector<Matrix>& block);

struct EvolvedSplit {
  Subspace fast;
  Subspace slow;
  double delta;  // sphere distance between them
};

// E_{j,n}, F_{j,n} and delta_{n,j} for every prefix length n.
std::vector<EvolvedSplit> singular_vector_evolution(
    const std::vector<Matrix>& block, int j);

struct BlockClassification {
  bool spread = false;
  double eta = 0.0;
  // First violating pair when nearly aligned, scanning n then j, 1-based.
  int n = 0;
  int j = 0;
  double delta = 0.0;
  // deltas[n-1][j-1] = delta_{n,j}
  std::vector<std::vector<double>> deltas;

  double min_delta() const;
  // Smallest delta_{n,j} over all n for a fixed j (spread margin for row j).
  double row_min(int j) const;
};

// Spread iff every delta_{n,j} exceeds eta; otherwise nearly aligned at the
// first violation.
BlockClassification classify_block(const std::vector<Matrix>& block,
                                   double eta);

}  // namespace lyapgap
