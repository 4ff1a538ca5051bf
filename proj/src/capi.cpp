#include "lyapgap.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "gluing/gluing.hpp"
#include "harness/battery.hpp"
#include "harness/bookkeeping.hpp"
#include "harness/constants.hpp"
#include "harness/experiments.hpp"
#include "matcore/svd.hpp"
#include "targets/evolution.hpp"

using namespace lyapgap;

struct lg_experiment {
  ExperimentConfig config;
};

struct lg_report {
  std::string json;
  std::vector<std::pair<std::string, std::string>> files;
  bool ok = true;
};

namespace {

thread_local std::string g_last_error;

lg_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return LG_ERR_INVALID_ARGUMENT;
    case ErrorKind::Precondition: return LG_ERR_PRECONDITION;
    case ErrorKind::Domain: return LG_ERR_DOMAIN;
    case ErrorKind::Singular: return LG_ERR_SINGULAR;
    case ErrorKind::DegenerateSum: return LG_ERR_DEGENERATE_SUM;
    case ErrorKind::Accumulation: return LG_ERR_ACCUMULATION;
    case ErrorKind::Io: return LG_ERR_IO;
    case ErrorKind::Parse: return LG_ERR_PARSE;
    case ErrorKind::Internal: return LG_ERR_INTERNAL;
  }
  return LG_ERR_INTERNAL;
}

template <typename Fn>
lg_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return LG_ERR_INTERNAL;
  }
}

Matrix matrix_from(int dim, const double* a) {
  if (dim < kMinDim || dim > kMaxDim)
    fail(ErrorKind::InvalidArgument, "dim must lie in [2, 8]");
  if (a == nullptr) fail(ErrorKind::InvalidArgument, "null matrix buffer");
  Matrix m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m.at(i, j) = a[i * dim + j];
  return m;
}

void matrix_to(const Matrix& m, double* out) {
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) out[i * m.dim() + j] = m.at(i, j);
}

}  // namespace

extern "C" {

const char* lg_version(void) { return "0.1.0"; }

const char* lg_status_name(lg_status status) {
  switch (status) {
    case LG_OK: return "ok";
    case LG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case LG_ERR_PRECONDITION: return "precondition";
    case LG_ERR_DOMAIN: return "domain";
    case LG_ERR_SINGULAR: return "singular";
    case LG_ERR_DEGENERATE_SUM: return "degenerate_sum";
    case LG_ERR_ACCUMULATION: return "accumulation";
    case LG_ERR_IO: return "io";
    case LG_ERR_PARSE: return "parse";
    case LG_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* lg_last_error(void) { return g_last_error.c_str(); }

lg_status lg_experiment_create(lg_experiment** out) {
  return guarded([&] {
    if (!out) fail(ErrorKind::InvalidArgument, "null output handle");
    *out = new lg_experiment{};
  });
}

lg_status lg_experiment_from_json(const char* json_text, lg_experiment** out) {
  return guarded([&] {
    if (!out || !json_text)
      fail(ErrorKind::InvalidArgument, "null argument");
    ExperimentConfig c = config_from_json(json_text);
    *out = new lg_experiment{std::move(c)};
  });
}

lg_status lg_experiment_to_json(const lg_experiment* e, lg_report** out) {
  return guarded([&] {
    if (!e || !out) fail(ErrorKind::InvalidArgument, "null argument");
    auto* r = new lg_report{};
    r->json = config_to_json(e->config);
    r->files.emplace_back("config.json", r->json + "\n");
    *out = r;
  });
}

void lg_experiment_free(lg_experiment* e) { delete e; }

lg_status lg_experiment_set_int(lg_experiment* e, const char* key, int value) {
  return guarded([&] {
    if (!e || !key) fail(ErrorKind::InvalidArgument, "null argument");
    std::string k = key;
    if (k == "dim") e->config.dim = value;
    else if (k == "threads") e->config.threads = value;
    else if (k == "gap_index") e->config.gap_index = value;
    else if (k == "pair_j") e->config.pair_j = value;
    else if (k == "pair_k") e->config.pair_k = value;
    else fail(ErrorKind::InvalidArgument, "unknown int key: " + k);
  });
}

lg_status lg_experiment_set_u64(lg_experiment* e, const char* key,
                                uint64_t value) {
  return guarded([&] {
    if (!e || !key) fail(ErrorKind::InvalidArgument, "null argument");
    std::string k = key;
    if (k == "seed") e->config.seed = value;
    else if (k == "n_max") e->config.n_max = value;
    else if (k == "trials") e->config.trials = value;
    else if (k == "block_len") e->config.block_len = value;
    else if (k == "traces") e->config.traces = value;
    else if (k == "glue_trials") e->config.glue_trials = value;
    else if (k == "sequence_seed") e->config.sequence_params.seed = value;
    else if (k == "horizon") e->config.sequence_params.horizon = value;
    else if (k == "schedule_stride")
      e->config.schedule = SampleSchedule::every(value);
    else fail(ErrorKind::InvalidArgument, "unknown u64 key: " + k);
  });
}

lg_status lg_experiment_set_real(lg_experiment* e, const char* key,
                                 double value) {
  return guarded([&] {
    if (!e || !key) fail(ErrorKind::InvalidArgument, "null argument");
    std::string k = key;
    if (k == "epsilon") e->config.epsilon = value;
    else if (k == "gamma") e->config.gamma = value;
    else if (k == "zeta") e->config.zeta = value;
    else if (k == "schedule_ratio")
      e->config.schedule = SampleSchedule::geometric(value);
    else if (k.rfind("param.", 0) == 0)
      e->config.sequence_params.values[k.substr(6)] = value;
    else fail(ErrorKind::InvalidArgument, "unknown real key: " + k);
  });
}

lg_status lg_experiment_set_string(lg_experiment* e, const char* key,
                                   const char* value) {
  return guarded([&] {
    if (!e || !key || !value) fail(ErrorKind::InvalidArgument, "null argument");
    std::string k = key, v = value;
    if (k == "sequence") e->config.sequence_kind = v;
    else if (k == "sequence_file") e->config.sequence_params.file_path = v;
    else if (k == "mode") e->config.constants_mode = v;
    else fail(ErrorKind::InvalidArgument, "unknown string key: " + k);
  });
}

lg_status lg_run_gap(const lg_experiment* e, lg_report** out) {
  return guarded([&] {
    if (!e || !out) fail(ErrorKind::InvalidArgument, "null argument");
    GapExperimentSummary s = run_gap_experiment(e->config);
    auto* r = new lg_report{};
    r->json = summary_to_json(s);
    r->files.emplace_back("summary.json", r->json + "\n");
    r->files.emplace_back("trajectories.csv", summary_trajectories_csv(s));
    *out = r;
  });
}

lg_status lg_run_bookkeeping(const lg_experiment* e, lg_report** out) {
  return guarded([&] {
    if (!e || !out) fail(ErrorKind::InvalidArgument, "null argument");
    const ExperimentConfig& c = e->config;
    nlohmann::json traces = nlohmann::json::array();
    double worst_residual = 0.0;
    uint64_t hits = 0, blocks = 0;
    double floor = 0.0;
    for (uint64_t t = 0; t < c.traces; ++t) {
      BookkeepingTrace tr =
          bookkeeping_simulation(c, c.gamma, c.block_len, c.n_max, t);
      worst_residual = std::max(worst_residual, std::fabs(tr.residual));
      hits += tr.hits;
      blocks += tr.blocks.size();
      floor = tr.log_hit_floor_per_block;
      traces.push_back(nlohmann::json::parse(trace_to_json(tr)));
    }
    nlohmann::json j;
    j["config_hash"] = config_hash(c);
    j["seed"] = c.seed;
    j["traces_run"] = c.traces;
    j["worst_abs_residual"] = worst_residual;
    j["hits"] = hits;
    j["blocks"] = blocks;
    j["log_hit_floor_per_block"] = floor;
    j["traces"] = traces;
    auto* r = new lg_report{};
    r->json = j.dump(2);
    r->files.emplace_back("bookkeeping.json", r->json + "\n");
    *out = r;
  });
}

lg_status lg_run_glue_tail(const lg_experiment* e, lg_report** out) {
  return guarded([&] {
    if (!e || !out) fail(ErrorKind::InvalidArgument, "null argument");
    const ExperimentConfig& c = e->config;
    auto rows = run_glue_battery(c.dim, c.epsilon, c.glue_trials, c.seed,
                                 c.threads);
    auto* r = new lg_report{};
    r->json = glue_battery_to_json(rows);
    r->files.emplace_back("glue_battery.json", r->json + "\n");
    std::string header =
        "# config=" + config_hash(c) + " seed=" + std::to_string(c.seed) + "\n";
    for (const auto& row : rows) {
      r->files.emplace_back("glue_" + row.name + ".csv",
                            header + glue_sample_to_csv(row.sample));
      r->ok = r->ok && row.rate_ok && row.mean_ok;
    }
    *out = r;
  });
}

lg_status lg_run_constants(const lg_experiment* e, lg_report** out) {
  return guarded([&] {
    if (!e || !out) fail(ErrorKind::InvalidArgument, "null argument");
    const ExperimentConfig& c = e->config;
    BoundReport rep = compute_bound_constants(c.dim, c.epsilon, c.zeta,
                                              c.pair_j, c.pair_k,
                                              c.constants_mode);
    auto* r = new lg_report{};
    r->json = bound_report_to_json(rep);
    r->files.emplace_back("constants.json", r->json + "\n");

    // Exponent trend over decades of epsilon, same mode and pair.
    std::string csv =
        "# config=" + config_hash(c) + " seed=" + std::to_string(c.seed) +
        "\nepsilon,log_gamma,log_block_len,log_log_inv_c,exponent_ratio\n";
    for (int k = 1; k <= 6; ++k) {
      double eps = std::pow(10.0, -k);
      BoundReport rr = compute_bound_constants(c.dim, eps, c.zeta, c.pair_j,
                                               c.pair_k, c.constants_mode);
      csv += format_g17(eps) + "," + format_g17(rr.log_gamma) + "," +
             format_g17(rr.log_block_len) + "," +
             format_g17(rr.log_log_inv_c) + "," +
             format_g17(rr.exponent_ratio) + "\n";
    }
    r->files.emplace_back("constants_sweep.csv", csv);
    *out = r;
  });
}

lg_status lg_run_verify(const lg_experiment* e, lg_report** out) {
  return guarded([&] {
    if (!e || !out) fail(ErrorKind::InvalidArgument, "null argument");
    VerifyReport rep = run_verify(e->config);
    auto* r = new lg_report{};
    r->json = verify_to_json(rep);
    r->files.emplace_back("verify.json", r->json + "\n");
    r->files.emplace_back("verify.csv", verify_to_csv(rep));
    r->ok = rep.all_pass;
    *out = r;
  });
}

const char* lg_report_json(const lg_report* r) {
  return r ? r->json.c_str() : "";
}

int lg_report_file_count(const lg_report* r) {
  return r ? static_cast<int>(r->files.size()) : 0;
}

const char* lg_report_file_name(const lg_report* r, int index) {
  if (!r || index < 0 || index >= static_cast<int>(r->files.size())) return "";
  return r->files[static_cast<size_t>(index)].first.c_str();
}

const char* lg_report_file_content(const lg_report* r, int index) {
  if (!r || index < 0 || index >= static_cast<int>(r->files.size())) return "";
  return r->files[static_cast<size_t>(index)].second.c_str();
}

lg_status lg_report_write(const lg_report* r, const char* out_dir) {
  return guarded([&] {
    if (!r || !out_dir) fail(ErrorKind::InvalidArgument, "null argument");
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create directory: " + dir.string());
    for (const auto& [name, content] : r->files) {
      std::ofstream f(dir / name, std::ios::binary);
      if (!f) fail(ErrorKind::Io, "cannot open for write: " + name);
      f << content;
      if (!f) fail(ErrorKind::Io, "write failed: " + name);
    }
  });
}

int lg_report_ok(const lg_report* r) { return r && r->ok ? 1 : 0; }

void lg_report_free(lg_report* r) { delete r; }

lg_status lg_svd(int dim, const double* a, double* u, double* s, double* v) {
  return guarded([&] {
    if (!u || !s || !v) fail(ErrorKind::InvalidArgument, "null buffer");
    SvdTriple f = svd(matrix_from(dim, a));
    matrix_to(f.u, u);
    matrix_to(f.v, v);
    for (int i = 0; i < dim; ++i) s[i] = f.s[i];
  });
}

lg_status lg_nonsingular_init(int dim, const double* a, double eps,
                              double* out) {
  return guarded([&] {
    if (!out) fail(ErrorKind::InvalidArgument, "null buffer");
    matrix_to(nonsingular_init(matrix_from(dim, a), eps), out);
  });
}

lg_status lg_glue_statistic(int dim, const double* l, const double* a,
                            const double* r, int j, int k, double* out) {
  return guarded([&] {
    if (!out) fail(ErrorKind::InvalidArgument, "null buffer");
    *out = glue_statistic(matrix_from(dim, l), matrix_from(dim, a),
                          matrix_from(dim, r), j, k);
  });
}

}  // extern "C"
