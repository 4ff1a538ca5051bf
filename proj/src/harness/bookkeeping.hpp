#pragma once

#include "harness/config.hpp"
#include "targets/builders.hpp"

namespace lyapgap {

// One realization of the block/target/transition bookkeeping that underlies
// the lower-bound argument: split the initialized sequence into blocks of
// length N, build a certified target per block, sample the perturbations,
// detect hits, and verify that the log-gap of the full product decomposes
// into per-segment terms plus gluing statistics.
struct BookkeepingTrace {
  int dim = 0;
  double epsilon = 0.0;
  double gamma = 0.0;
  uint64_t block_len = 0;  // N
  uint64_t n = 0;
  int j = 1, k = 2;

  struct BlockRecord {
    uint64_t block = 0;      // block index l
    uint64_t first = 0;      // absolute target range [first, last]
    uint64_t last = 0;
    double cert_log_ratio = 0.0;
    bool hit = false;
  };
  std::vector<BlockRecord> blocks;
  std::vector<uint64_t> transitions;  // T_1 < T_2 < ...
  std::vector<double> g_segments;     // G(B_i) between transitions
  double g_tail = 0.0;
  std::vector<double> f_transitions;  // F at T_1..T_{L}
  double g_total = 0.0;
  double residual = 0.0;  // defect of the decomposition identity

  uint64_t hits = 0;
  double log_ball_radius = 0.0;
  double log_hit_floor_per_block = 0.0;  // min over blocks of the volume floor
  double log_p_paper = 0.0;
  double mean_segment_g = 0.0;
  bool decompose_all = false;
};

// config fields used: dim, epsilon, seed, sequence, gap pair via gap_index.
// Builder dispatch: d = 2 uses the extremal construction; d = 3 the full
// three-case dispatch; orthogonal sequences of any d the spread boost.
// stream selects the perturbation stream (one trace per stream).
BookkeepingTrace bookkeeping_simulation(const ExperimentConfig& config,
                                        double gamma, uint64_t block_len,
                                        uint64_t n, uint64_t stream);

std::string trace_to_json(const BookkeepingTrace& t);

}  // namespace lyapgap
