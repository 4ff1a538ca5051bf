#pragma once

#include <string>

namespace lyapgap {

// Proof-scale constants: required gap, block length, target-hit floor and
// the resulting rate lower bound c = p/N, all in log space (for d = 3 even
// log c overflows a double, so the doubly-logarithmic value is the primary
// field). zeta feeds the gluing constant K = 4d(log zeta + 1).
struct BoundReport {
  int dim = 0;
  double epsilon = 0.0;
  double zeta = 0.0;
  std::string mode;  // "general" or "orthogonal"
  int j = 1;
  int k = 2;

  double k_const = 0.0;       // 4d(log zeta + 1)
  double lambda_floor = 0.0;  // 4d log(eps) - k_const
  double log_gamma = 0.0;     // required gap, log(2e^{2+2|lambda|})
  double log_block_len = 0.0; // log N from the matching target construction
  double log_log_inv_p = 0.0; // log(log(1/p)), p the per-block hit floor
  double log_log_inv_c = 0.0; // log(log(1/c)), c = p/N
  double log_p = 0.0;         // -exp(log_log_inv_p), -inf when out of range
  double log_c = 0.0;
  double exponent_ratio = 0.0;  // log(log(1/c)) / log(1/eps)
};

// mode "general": pair (1,2)/(2,3) for d = 3 via the 3x3 construction,
// pair (1,d) otherwise via the extremal one. mode "orthogonal": any
// consecutive pair; every block of orthogonal matrices is sqrt(2)-spread.
BoundReport compute_bound_constants(int dim, double epsilon, double zeta,
                                    int j, int k,
                                    const std::string& mode = "general");

std::string bound_report_to_json(const BoundReport& r);

}  // namespace lyapgap
