#pragma once

#include <functional>
#include <optional>

#include "gluing/gluing.hpp"
#include "harness/config.hpp"

namespace lyapgap {

// Runs fn(0..count-1) on a small worker pool. Each index writes its own
// result slot, so aggregation does not depend on thread scheduling.
void parallel_for(uint64_t count, int threads,
                  const std::function<void(uint64_t)>& fn);

struct TrialOutcome {
  uint64_t trial = 0;
  bool failed = false;
  std::string error;
  std::vector<double> liminf;  // per gap index, empty when failed
  GapTrajectory trajectory;
};

struct GapExperimentSummary {
  std::string config_hash;
  uint64_t seed = 0;
  int dim = 0;
  double epsilon = 0.0;
  std::string sequence;
  uint64_t n_max = 0;
  std::vector<TrialOutcome> trials;
  uint64_t failed_trials = 0;
  std::vector<double> mean;       // per gap index over successful trials
  std::vector<double> std_error;  // per gap index
  std::vector<bool> positive_3sigma;
};

// Independent perturbation streams (stream id = trial index), trailing
// liminf proxies per consecutive gap, positivity flags at three standard
// errors. Trials that hit accumulation errors are excluded and counted.
GapExperimentSummary run_gap_experiment(const ExperimentConfig& config);

std::string summary_to_json(const GapExperimentSummary& s);
std::string summary_trajectories_csv(const GapExperimentSummary& s);

struct PrefixConstancyRow {
  uint64_t m = 0;
  double gap_full = 0.0;
  double gap_shifted = 0.0;
  double difference = 0.0;
  double prefix_log_spread = 0.0;  // log C - log c of the dropped prefix
};

// Gap estimates with the first m factors dropped, for each m; the
// statistical face of the almost-sure constancy lemma.
std::vector<PrefixConstancyRow> prefix_constancy_experiment(
    const ExperimentConfig& config, const std::vector<uint64_t>& m_list);

std::string prefix_rows_to_csv(const std::vector<PrefixConstancyRow>& rows);

struct GlueCase {
  std::string name;
  Matrix l, a, r;
  int j = 1, k = 2;
};

// Eight (L, A, R) stress configurations per dimension, from benign to
// adversarially ill-conditioned outer factors.
std::vector<GlueCase> glue_stress_battery(int dim);

struct GlueBatteryRow {
  std::string name;
  int j = 1, k = 2;
  GlueSample sample;
  GlueMoments moments;
  double k_hat = 0.0;        // 4d(log zeta + 1)
  double mean_floor = 0.0;   // 4d log eps - k_hat
  bool rate_ok = false;      // fitted rate >= 0.9 / (4d)
  bool mean_ok = false;      // mean >= floor - 3 stderr
};

std::vector<GlueBatteryRow> run_glue_battery(int dim, double epsilon,
                                             uint64_t trials, uint64_t seed,
                                             int threads = 1);

std::string glue_battery_to_json(const std::vector<GlueBatteryRow>& rows);

}  // namespace lyapgap
