#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cocycle/accumulator.hpp"
#include "cocycle/philox.hpp"
#include "cocycle/sequence.hpp"

namespace lyapgap {

// Sampled trajectory of the consecutive singular-value growth-rate gaps
// (1/n) log(s_j / s_{j+1}) of the running perturbed product.
struct GapTrajectory {
  int dim = 0;
  std::vector<uint64_t> steps;             // increasing sample steps
  std::vector<std::vector<double>> gaps;   // per step, d-1 entries, all >= 0
};

struct SampleSchedule {
  enum class Kind { EveryK, Geometric };
  Kind kind = Kind::Geometric;
  double param = 1.1;  // stride for EveryK, ratio for Geometric

  static SampleSchedule every(uint64_t k);
  static SampleSchedule geometric(double ratio);

  // Ascending sample points in [1, n_max], always including n_max.
  std::vector<uint64_t> points(uint64_t n_max) const;
};

GapTrajectory gap_trajectory(const SequenceSource& seq,
                             const PerturbationModel& model, uint64_t n_max,
                             const SampleSchedule& schedule,
                             int renorm_period = 16);

// Liminf proxy per gap index: bucket the sampled steps in the trailing half
// of the run by decade of n, average each bucket, take the minimum. A single
// terminal sample can overshoot a liminf; this cannot.
std::vector<double> liminf_proxy(const GapTrajectory& t);

struct PrefixInvariance {
  double gap_full = 0.0;     // liminf proxy of the (j, j+1) gap, all factors
  double gap_shifted = 0.0;  // same with the first m factors dropped
  double prefix_log_min = 0.0;  // log of min partial singular-value product
  double prefix_log_max = 0.0;  // log of max partial singular-value product
};

// The almost-sure constancy check: dropping a fixed prefix moves the gap
// estimate by at most O((log C - log c) / n) where c, C are the extreme
// partial singular-value products of the prefix.
PrefixInvariance prefix_invariance_check(const SequenceSource& seq,
                                         const PerturbationModel& model,
                                         uint64_t m, uint64_t n_max, int j = 1,
                                         const SampleSchedule& schedule =
                                             SampleSchedule{});

// 17-significant-digit decimal text; round-trips doubles bit for bit.
std::string format_g17(double x);

std::string trajectory_to_csv(const GapTrajectory& t);
GapTrajectory trajectory_from_csv(const std::string& text);
std::string trajectory_to_json(const GapTrajectory& t);
GapTrajectory trajectory_from_json(const std::string& text);

}  // namespace lyapgap
