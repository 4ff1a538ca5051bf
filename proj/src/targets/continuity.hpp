#pragma once

#include <cstdint>

#include "targets/builders.hpp"

namespace lyapgap {

struct ContinuityReport {
  double min_factor = 0.0;     // min over trials of perturbed / target ratio
  double log_ball_radius = 0.0;  // log of the infinity-ball radius used
  double log_hit_prob = 0.0;     // log of the per-block ball-volume floor
  double log_p_paper = 0.0;      // log of the conservative closed-form floor
  uint64_t trials = 0;
};

// Samples `trials` independent perturbations of the target matrices inside
// the infinity-ball of radius (eps/4)^N / (3dN) and reports the worst ratio
// of perturbed to target (j, k)-gap; the triangle-inequality continuity
// bound keeps it at 1/2 or above. Preconditions: every target matrix has
// norm <= 1 - eps/4 and smallest singular value >= eps/4.
ContinuityReport target_continuity_check(const TargetBlock& target, double eps,
                                         int n_block, uint64_t trials,
                                         uint64_t seed = 0,
                                         uint64_t stream = 0);

}  // namespace lyapgap
