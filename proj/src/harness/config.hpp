#pragma once

#include <cstdint>
#include <string>

#include "cocycle/trajectory.hpp"
#include "harness/generators.hpp"

namespace lyapgap {

// One configuration drives every subcommand; unused sections keep defaults.
struct ExperimentConfig {
  int dim = 2;
  double epsilon = 0.5;
  uint64_t seed = 0;
  uint64_t n_max = 100000;
  uint64_t trials = 32;
  int threads = 1;
  int gap_index = 0;  // 0 = all consecutive gaps, else a single j

  std::string sequence_kind = "zero";
  GeneratorParams sequence_params;

  SampleSchedule schedule = SampleSchedule::geometric(1.15);

  // bookkeeping
  double gamma = 1.25;
  uint64_t block_len = 4;  // N: blocks cover [lN+1, lN+N-1]
  uint64_t traces = 1;
  bool decompose_all_targets = true;

  // gluing
  uint64_t glue_trials = 100000;

  // constants calculator
  double zeta = 0.19;
  std::string constants_mode = "general";  // or "orthogonal"
  int pair_j = 1;
  int pair_k = 0;  // 0 picks d (the extremal pair)

  void validate() const;
  SequenceSource make_sequence() const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& c);

// FNV-1a hash of the canonical JSON form, hex; embedded in output headers
// so result files can be traced to their configuration.
std::string config_hash(const ExperimentConfig& c);

}  // namespace lyapgap
