// Command-line harness over the lyapgap shared library (C API only).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyapgap.h"

namespace {

struct Cleanup {
  lg_experiment* experiment = nullptr;
  lg_report* report = nullptr;
  ~Cleanup() {
    lg_report_free(report);
    lg_experiment_free(experiment);
  }
};

int fail_with(lg_status status, const std::string& where) {
  std::cerr << "error (" << lg_status_name(status) << ") in " << where << ": "
            << lg_last_error() << "\n";
  return 2;
}

void print_gap_summary(const nlohmann::json& j) {
  std::cout << "sequence=" << j.value("sequence", std::string("?"))
            << " d=" << j["dim"] << " eps=" << j["epsilon"]
            << " n_max=" << j["n_max"] << " failed_trials="
            << j["failed_trials"] << "\n";
  const auto& mean = j["mean"];
  const auto& se = j["std_error"];
  const auto& pos = j["positive_3sigma"];
  for (size_t i = 0; i < mean.size(); ++i) {
    std::cout << "  gap_" << (i + 1) << ": mean=" << mean[i].get<double>()
              << " stderr=" << se[i].get<double>()
              << (pos[i].get<bool>() ? "  positive at 3 sigma"
                                     : "  NOT positive at 3 sigma")
              << "\n";
  }
}

void print_verify_summary(const nlohmann::json& j) {
  for (const auto& c : j["checks"]) {
    std::cout << (c["pass"].get<bool>() ? "[PASS] " : "[FAIL] ")
              << c["name"].get<std::string>() << " (count="
              << c["count"].get<uint64_t>() << ", worst="
              << c["worst"].get<double>() << ", limit="
              << c["limit"].get<double>() << ")\n";
  }
  std::cout << (j["all_pass"].get<bool>() ? "verify: all checks passed"
                                          : "verify: FAILURES present")
            << "\n";
}

void print_constants_summary(const nlohmann::json& j) {
  std::cout << "d=" << j["dim"] << " eps=" << j["epsilon"] << " mode="
            << j["mode"].get<std::string>() << " pair=(" << j["j"] << ","
            << j["k"] << ")\n";
  std::cout << "  log Gamma        = " << j["log_gamma"].get<double>() << "\n";
  std::cout << "  log N            = " << j["log_block_len"].get<double>()
            << "\n";
  std::cout << "  log log(1/c)     = " << j["log_log_inv_c"].get<double>()
            << "\n";
  std::cout << "  exponent ratio   = " << j["exponent_ratio"].get<double>()
            << "  (log log(1/c) / log(1/eps))\n";
}

void print_bookkeeping_summary(const nlohmann::json& j) {
  std::cout << "traces=" << j["traces_run"] << " blocks=" << j["blocks"]
            << " hits=" << j["hits"] << "\n";
  std::cout << "  worst |residual| = " << j["worst_abs_residual"].get<double>()
            << "\n";
  std::cout << "  log p floor/block= "
            << j["log_hit_floor_per_block"].get<double>() << "\n";
}

void print_glue_summary(const nlohmann::json& j) {
  for (const auto& row : j) {
    std::cout << "  " << row["name"].get<std::string>() << " (j="
              << row["j"] << ",k=" << row["k"] << "): mean="
              << row["mean"].get<double>();
    if (row["sample"].contains("fit"))
      std::cout << " rate=" << row["sample"]["fit"]["rate"].get<double>()
                << " zeta=" << row["sample"]["fit"]["zeta"].get<double>();
    std::cout << (row["rate_ok"].get<bool>() && row["mean_ok"].get<bool>()
                      ? "  ok"
                      : "  CHECK FAILED")
              << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lyapgap: singular-value gap experiments for randomly "
               "perturbed matrix cocycles"};
  app.require_subcommand(1);

  std::string config_path, out_dir, sequence, sequence_file, mode;
  uint64_t seed = 0, n_max = 0, trials = 0, block_len = 0, traces = 0,
           glue_trials = 0;
  int threads = 0, dim = 0, gap_index = -1, pair_j = 0, pair_k = -1;
  double epsilon = -1.0, gamma = 0.0, zeta = 0.0;

  app.add_option("--config", config_path, "configuration JSON file");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory for result files");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--dim", dim, "matrix dimension (2..8)");
  app.add_option("--epsilon", epsilon, "perturbation amplitude in (0,1)");
  app.add_option("--n-max", n_max, "product length");
  app.add_option("--trials", trials, "independent perturbation streams");
  app.add_option("--sequence", sequence,
                 "sequence generator (identity, zero, constant, "
                 "orthogonal_random, orthogonal_cyclic, rank_collapse, "
                 "bochi_align, custom_file)");
  app.add_option("--sequence-file", sequence_file,
                 "matrix file for custom_file");
  app.add_option("--gap-index", gap_index, "gap index j (0 = all)");
  app.add_option("--gamma", gamma, "required gap for bookkeeping");
  app.add_option("--block-len", block_len, "block length N for bookkeeping");
  app.add_option("--traces", traces, "bookkeeping traces");
  app.add_option("--glue-trials", glue_trials, "Monte Carlo trials per case");
  app.add_option("--zeta", zeta, "gluing constant for the calculator");
  app.add_option("--mode", mode, "constants mode: general or orthogonal");
  app.add_option("--pair-j", pair_j, "calculator pair j");
  app.add_option("--pair-k", pair_k, "calculator pair k (0 = d)");

  auto* cmd_gap = app.add_subcommand("gap-run", "trailing gap estimates");
  auto* cmd_book = app.add_subcommand("bookkeep", "block/target bookkeeping");
  auto* cmd_glue = app.add_subcommand("glue-tail", "gluing tail battery");
  auto* cmd_const = app.add_subcommand("constants", "proof-scale constants");
  auto* cmd_verify = app.add_subcommand("verify", "full invariant battery");

  CLI11_PARSE(app, argc, argv);

  Cleanup scope;
  lg_status st;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config file " << config_path << "\n";
      return 2;
    }
    std::ostringstream os;
    os << in.rdbuf();
    st = lg_experiment_from_json(os.str().c_str(), &scope.experiment);
  } else {
    st = lg_experiment_create(&scope.experiment);
  }
  if (st != LG_OK) return fail_with(st, "configuration");

  auto set_u64 = [&](const char* key, uint64_t v) {
    return lg_experiment_set_u64(scope.experiment, key, v);
  };
  if (app.count("--seed")) set_u64("seed", seed);
  if (app.count("--n-max")) set_u64("n_max", n_max);
  if (app.count("--trials")) set_u64("trials", trials);
  if (app.count("--block-len")) set_u64("block_len", block_len);
  if (app.count("--traces")) set_u64("traces", traces);
  if (app.count("--glue-trials")) set_u64("glue_trials", glue_trials);
  if (app.count("--threads"))
    lg_experiment_set_int(scope.experiment, "threads", threads);
  if (app.count("--dim")) lg_experiment_set_int(scope.experiment, "dim", dim);
  if (app.count("--gap-index"))
    lg_experiment_set_int(scope.experiment, "gap_index", gap_index);
  if (app.count("--pair-j"))
    lg_experiment_set_int(scope.experiment, "pair_j", pair_j);
  if (app.count("--pair-k"))
    lg_experiment_set_int(scope.experiment, "pair_k", pair_k);
  if (app.count("--epsilon"))
    lg_experiment_set_real(scope.experiment, "epsilon", epsilon);
  if (app.count("--gamma"))
    lg_experiment_set_real(scope.experiment, "gamma", gamma);
  if (app.count("--zeta"))
    lg_experiment_set_real(scope.experiment, "zeta", zeta);
  if (app.count("--sequence")) {
    if (lg_experiment_set_string(scope.experiment, "sequence",
                                 sequence.c_str()) != LG_OK)
      return fail_with(LG_ERR_INVALID_ARGUMENT, "--sequence");
  }
  if (app.count("--sequence-file"))
    lg_experiment_set_string(scope.experiment, "sequence_file",
                             sequence_file.c_str());
  if (app.count("--mode"))
    lg_experiment_set_string(scope.experiment, "mode", mode.c_str());

  std::string name;
  if (cmd_gap->parsed()) {
    name = "gap-run";
    st = lg_run_gap(scope.experiment, &scope.report);
  } else if (cmd_book->parsed()) {
    name = "bookkeep";
    st = lg_run_bookkeeping(scope.experiment, &scope.report);
  } else if (cmd_glue->parsed()) {
    name = "glue-tail";
    st = lg_run_glue_tail(scope.experiment, &scope.report);
  } else if (cmd_const->parsed()) {
    name = "constants";
    st = lg_run_constants(scope.experiment, &scope.report);
  } else {
    name = "verify";
    st = lg_run_verify(scope.experiment, &scope.report);
  }
  if (st != LG_OK) return fail_with(st, name);

  nlohmann::json j = nlohmann::json::parse(lg_report_json(scope.report));
  if (name == "gap-run") print_gap_summary(j);
  else if (name == "verify") print_verify_summary(j);
  else if (name == "constants") print_constants_summary(j);
  else if (name == "bookkeep") print_bookkeeping_summary(j);
  else print_glue_summary(j);

  if (!out_dir.empty()) {
    st = lg_report_write(scope.report, out_dir.c_str());
    if (st != LG_OK) return fail_with(st, "writing results");
    for (int i = 0; i < lg_report_file_count(scope.report); ++i)
      std::cout << "wrote " << out_dir << "/"
                << lg_report_file_name(scope.report, i) << "\n";
  }

  return lg_report_ok(scope.report) ? 0 : 1;
}
