#include "harness/experiments.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "matcore/svd.hpp"

namespace lyapgap {

void parallel_for(uint64_t count, int threads,
                  const std::function<void(uint64_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<uint64_t> next{0};
  std::vector<std::thread> pool;
  int n_workers = std::min<int>(threads, static_cast<int>(count));
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        uint64_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

GapExperimentSummary run_gap_experiment(const ExperimentConfig& config) {
  config.validate();
  SequenceSource seq = config.make_sequence();

  GapExperimentSummary out;
  out.config_hash = config_hash(config);
  out.seed = config.seed;
  out.dim = config.dim;
  out.epsilon = config.epsilon;
  out.sequence = config.sequence_kind;
  out.n_max = config.n_max;
  out.trials.resize(config.trials);

  parallel_for(config.trials, config.threads, [&](uint64_t t) {
    TrialOutcome& r = out.trials[t];
    r.trial = t;
    PerturbationModel model{config.dim, config.epsilon, config.seed, t};
    try {
      r.trajectory = gap_trajectory(seq, model, config.n_max, config.schedule);
      r.liminf = liminf_proxy(r.trajectory);
    } catch (const Error& e) {
      r.failed = true;
      r.error = e.what();
    }
  });

  const int gaps = config.dim - 1;
  out.mean.assign(static_cast<size_t>(gaps), 0.0);
  out.std_error.assign(static_cast<size_t>(gaps), 0.0);
  out.positive_3sigma.assign(static_cast<size_t>(gaps), false);
  uint64_t ok = 0;
  for (const auto& r : out.trials) {
    if (r.failed) {
      ++out.failed_trials;
      continue;
    }
    ++ok;
    for (int j = 0; j < gaps; ++j)
      out.mean[static_cast<size_t>(j)] += r.liminf[static_cast<size_t>(j)];
  }
  if (ok > 0) {
    for (int j = 0; j < gaps; ++j) out.mean[static_cast<size_t>(j)] /= static_cast<double>(ok);
    for (const auto& r : out.trials) {
      if (r.failed) continue;
      for (int j = 0; j < gaps; ++j) {
        double d = r.liminf[static_cast<size_t>(j)] - out.mean[static_cast<size_t>(j)];
        out.std_error[static_cast<size_t>(j)] += d * d;
      }
    }
    for (int j = 0; j < gaps; ++j) {
      double var = ok > 1 ? out.std_error[static_cast<size_t>(j)] /
                                static_cast<double>(ok - 1)
                          : 0.0;
      out.std_error[static_cast<size_t>(j)] =
          std::sqrt(var / static_cast<double>(ok));
      out.positive_3sigma[static_cast<size_t>(j)] =
          out.mean[static_cast<size_t>(j)] -
              3.0 * out.std_error[static_cast<size_t>(j)] >
          0.0;
    }
  }
  return out;
}

std::string summary_to_json(const GapExperimentSummary& s) {
  nlohmann::json j;
  j["config_hash"] = s.config_hash;
  j["seed"] = s.seed;
  j["dim"] = s.dim;
  j["epsilon"] = s.epsilon;
  j["sequence"] = s.sequence;
  j["n_max"] = s.n_max;
  j["failed_trials"] = s.failed_trials;
  j["mean"] = s.mean;
  j["std_error"] = s.std_error;
  j["positive_3sigma"] = s.positive_3sigma;
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : s.trials) {
    nlohmann::json row;
    row["trial"] = t.trial;
    row["failed"] = t.failed;
    if (t.failed)
      row["error"] = t.error;
    else
      row["liminf"] = t.liminf;
    trials.push_back(row);
  }
  j["trials"] = trials;
  return j.dump(2);
}

std::string summary_trajectories_csv(const GapExperimentSummary& s) {
  std::ostringstream os;
  os << "# config=" << s.config_hash << " seed=" << s.seed << "\n";
  os << "trial,n";
  for (int j = 1; j < s.dim; ++j) os << ",gap_" << j;
  os << "\n";
  for (const auto& t : s.trials) {
    if (t.failed) continue;
    for (size_t i = 0; i < t.trajectory.steps.size(); ++i) {
      os << t.trial << "," << t.trajectory.steps[i];
      for (double g : t.trajectory.gaps[i]) os << "," << format_g17(g);
      os << "\n";
    }
  }
  return os.str();
}

std::vector<PrefixConstancyRow> prefix_constancy_experiment(
    const ExperimentConfig& config, const std::vector<uint64_t>& m_list) {
  config.validate();
  SequenceSource seq = config.make_sequence();
  PerturbationModel model{config.dim, config.epsilon, config.seed, 0};
  int j = config.gap_index == 0 ? 1 : config.gap_index;

  std::vector<PrefixConstancyRow> rows;
  for (uint64_t m : m_list) {
    PrefixInvariance r = prefix_invariance_check(seq, model, m, config.n_max,
                                                 j, config.schedule);
    PrefixConstancyRow row;
    row.m = m;
    row.gap_full = r.gap_full;
    row.gap_shifted = r.gap_shifted;
    row.difference = std::fabs(r.gap_full - r.gap_shifted);
    row.prefix_log_spread = r.prefix_log_max - r.prefix_log_min;
    rows.push_back(row);
  }
  return rows;
}

std::string prefix_rows_to_csv(const std::vector<PrefixConstancyRow>& rows) {
  std::string text = "m,gap_full,gap_shifted,difference,prefix_log_spread\n";
  for (const auto& r : rows) {
    text += std::to_string(r.m) + "," + format_g17(r.gap_full) + "," +
            format_g17(r.gap_shifted) + "," + format_g17(r.difference) + "," +
            format_g17(r.prefix_log_spread) + "\n";
  }
  return text;
}

std::vector<GlueCase> glue_stress_battery(int dim) {
  const int d = dim;
  Matrix id = Matrix::identity(d);

  auto tilt = [&](double angle) {
    Matrix m = id;
    for (int p = 0; p + 1 < d; ++p)
      m = m * Matrix::plane_rotation(d, p, p + 1, angle);
    return m;
  };
  auto graded = [&](double lo, bool reversed) {
    Vec s(d);
    for (int i = 0; i < d; ++i) {
      double t = d == 1 ? 0.0 : static_cast<double>(i) / (d - 1);
      s[i] = std::pow(lo, reversed ? 1.0 - t : t);
    }
    return Matrix::diagonal(s);
  };
  Matrix rank1(d);
  rank1.at(0, 0) = 1.0;
  Matrix mixed(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      mixed.at(i, j) = ((i * 7 + j * 3 + 1) % 5 - 2) / 4.0;
  mixed = mixed * (1.0 / operator_norm(mixed));

  int mid = d > 2 ? 2 : 2;
  std::vector<GlueCase> cases = {
      {"identity-noise", id, Matrix::zero(d), id, 1, 2},
      {"identity-signal", id, id, id, 1, d},
      {"graded-left", graded(1e-6, false), Matrix::zero(d), id, 1, 2},
      {"graded-both", graded(1e-6, false), mixed, graded(1e-6, true), 1, d},
      {"rotated", tilt(0.7) * graded(0.5, false), mixed, tilt(-0.4), 1, mid},
      {"rank-one-core", graded(1e-3, false), rank1, id, 1, 2},
      {"near-identity", id * 0.9, id * 0.9, id * 0.9, d - 1, d},
      {"large-left", graded(1e-2, true) * tilt(0.3) * 100.0, mixed, tilt(1.1),
       1, d},
  };
  return cases;
}

std::vector<GlueBatteryRow> run_glue_battery(int dim, double epsilon,
                                             uint64_t trials, uint64_t seed,
                                             int threads) {
  std::vector<GlueCase> cases = glue_stress_battery(dim);
  std::vector<GlueBatteryRow> rows(cases.size());
  parallel_for(cases.size(), threads, [&](uint64_t i) {
    const GlueCase& c = cases[i];
    GlueBatteryRow& row = rows[i];
    row.name = c.name;
    row.j = c.j;
    row.k = c.k;
    row.sample = tail_profile(c.l, c.a, c.r, c.j, c.k, epsilon, trials, {},
                              seed, 2 * i);
    row.moments = expectation_floor(c.l, c.a, c.r, c.j, c.k, epsilon, trials,
                                    seed, 2 * i + 1);
    const double quarter_rate = 1.0 / (4.0 * dim);
    if (row.sample.fitted) {
      row.k_hat = 4.0 * dim * (std::log(row.sample.fitted->zeta) + 1.0);
      row.rate_ok = row.sample.fitted->rate >= 0.9 * quarter_rate;
    }
    row.mean_floor = 4.0 * dim * std::log(epsilon) - row.k_hat;
    row.mean_ok =
        row.moments.mean >= row.mean_floor - 3.0 * row.moments.std_error;
  });
  return rows;
}

std::string glue_battery_to_json(const std::vector<GlueBatteryRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row;
    row["name"] = r.name;
    row["j"] = r.j;
    row["k"] = r.k;
    row["sample"] = nlohmann::json::parse(glue_sample_to_json(r.sample));
    row["mean"] = r.moments.mean;
    row["std_error"] = r.moments.std_error;
    row["saturated"] = r.moments.saturated;
    row["k_hat"] = r.k_hat;
    row["mean_floor"] = r.mean_floor;
    row["rate_ok"] = r.rate_ok;
    row["mean_ok"] = r.mean_ok;
    j.push_back(row);
  }
  return j.dump(2);
}

}  // namespace lyapgap
