#include "harness/config.hpp"

#include <json.hpp>

#include "error.hpp"

namespace lyapgap {

void ExperimentConfig::validate() const {
  if (dim < kMinDim || dim > kMaxDim)
    fail(ErrorKind::InvalidArgument, "config: dim must lie in [2, 8]");
  if (!(epsilon >= 0.0) || epsilon >= 1.0)
    fail(ErrorKind::InvalidArgument, "config: epsilon must lie in [0, 1)");
  if (n_max < 1000)
    fail(ErrorKind::InvalidArgument, "config: n_max must be at least 1e3");
  if (trials < 1) fail(ErrorKind::InvalidArgument, "config: trials >= 1");
  if (threads < 1) fail(ErrorKind::InvalidArgument, "config: threads >= 1");
  if (gap_index < 0 || gap_index >= dim)
    fail(ErrorKind::InvalidArgument, "config: gap index out of range");
}

SequenceSource ExperimentConfig::make_sequence() const {
  GeneratorParams p = sequence_params;
  if (p.seed == 0) p.seed = seed;
  if (p.horizon == 0) p.horizon = n_max;
  return generate_sequence(sequence_kind, p, dim);
}

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("config json: ") + e.what());
  }
  try {
    c.dim = j.value("dim", c.dim);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.seed = j.value("seed", c.seed);
    c.n_max = j.value("n_max", c.n_max);
    c.trials = j.value("trials", c.trials);
    c.threads = j.value("threads", c.threads);
    c.gap_index = j.value("gap_index", c.gap_index);
    if (j.contains("sequence")) {
      const auto& s = j["sequence"];
      c.sequence_kind = s.value("kind", c.sequence_kind);
      if (s.contains("params"))
        for (auto it = s["params"].begin(); it != s["params"].end(); ++it)
          c.sequence_params.values[it.key()] = it.value().get<double>();
      c.sequence_params.file_path = s.value("file", std::string{});
      c.sequence_params.seed = s.value("seed", uint64_t{0});
      if (s.contains("matrix")) {
        Matrix m(c.dim);
        const auto& arr = s["matrix"];
        size_t idx = 0;
        for (int r = 0; r < c.dim; ++r)
          for (int col = 0; col < c.dim; ++col)
            m.at(r, col) = arr.at(idx++).get<double>();
        c.sequence_params.matrices = {m};
      }
    }
    if (j.contains("schedule")) {
      const auto& s = j["schedule"];
      std::string kind = s.value("kind", std::string("geometric"));
      if (kind == "every")
        c.schedule = SampleSchedule::every(s.value("stride", uint64_t{100}));
      else
        c.schedule = SampleSchedule::geometric(s.value("ratio", 1.15));
    }
    if (j.contains("bookkeeping")) {
      const auto& b = j["bookkeeping"];
      c.gamma = b.value("gamma", c.gamma);
      c.block_len = b.value("block_len", c.block_len);
      c.traces = b.value("traces", c.traces);
      c.decompose_all_targets =
          b.value("decompose_all_targets", c.decompose_all_targets);
    }
    if (j.contains("glue")) c.glue_trials = j["glue"].value("trials", c.glue_trials);
    if (j.contains("constants")) {
      const auto& k = j["constants"];
      c.zeta = k.value("zeta", c.zeta);
      c.constants_mode = k.value("mode", c.constants_mode);
      c.pair_j = k.value("pair_j", c.pair_j);
      c.pair_k = k.value("pair_k", c.pair_k);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("config json: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["dim"] = c.dim;
  j["epsilon"] = c.epsilon;
  j["seed"] = c.seed;
  j["n_max"] = c.n_max;
  j["trials"] = c.trials;
  j["threads"] = c.threads;
  j["gap_index"] = c.gap_index;
  j["sequence"]["kind"] = c.sequence_kind;
  for (const auto& [key, value] : c.sequence_params.values)
    j["sequence"]["params"][key] = value;
  if (!c.sequence_params.file_path.empty())
    j["sequence"]["file"] = c.sequence_params.file_path;
  if (c.sequence_params.seed != 0) j["sequence"]["seed"] = c.sequence_params.seed;
  if (!c.sequence_params.matrices.empty()) {
    std::vector<double> flat;
    const Matrix& m = c.sequence_params.matrices.front();
    for (int r = 0; r < c.dim; ++r)
      for (int col = 0; col < c.dim; ++col) flat.push_back(m.at(r, col));
    j["sequence"]["matrix"] = flat;
  }
  j["schedule"]["kind"] =
      c.schedule.kind == SampleSchedule::Kind::EveryK ? "every" : "geometric";
  if (c.schedule.kind == SampleSchedule::Kind::EveryK)
    j["schedule"]["stride"] = static_cast<uint64_t>(c.schedule.param);
  else
    j["schedule"]["ratio"] = c.schedule.param;
  j["bookkeeping"] = {{"gamma", c.gamma},
                      {"block_len", c.block_len},
                      {"traces", c.traces},
                      {"decompose_all_targets", c.decompose_all_targets}};
  j["glue"] = {{"trials", c.glue_trials}};
  j["constants"] = {{"zeta", c.zeta},
                    {"mode", c.constants_mode},
                    {"pair_j", c.pair_j},
                    {"pair_k", c.pair_k}};
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& c) {
  std::string text = config_to_json(c);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lyapgap
