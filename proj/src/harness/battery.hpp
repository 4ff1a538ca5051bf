#pragma once

#include "harness/config.hpp"

namespace lyapgap {

struct VerifyCheck {
  std::string name;
  uint64_t count = 0;   // instances exercised
  double worst = 0.0;   // worst observed violation (<= limit passes)
  double limit = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::string config_hash;
  uint64_t seed = 0;
  std::vector<VerifyCheck> checks;
  bool all_pass = false;
};

// The full invariant battery: SVD contracts, projection and sphere bounds,
// accumulator stability and reproducibility, target certificates, gluing
// identities and tails, bookkeeping residuals, constants consistency.
// Deterministic for a fixed seed.
VerifyReport run_verify(const ExperimentConfig& config);

std::string verify_to_json(const VerifyReport& r);
std::string verify_to_csv(const VerifyReport& r);

}  // namespace lyapgap
