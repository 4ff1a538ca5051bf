#include "harness/bookkeeping.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "cocycle/accumulator.hpp"
#include "targets/continuity.hpp"
#include "targets/evolution.hpp"

namespace lyapgap {

namespace {

bool orthogonal_kind(const std::string& kind) {
  return kind == "orthogonal_random" || kind == "orthogonal_cyclic" ||
         kind == "identity";
}

TargetBlock build_block_target(const std::vector<Matrix>& mats, int dim,
                               const std::string& kind, double eps,
                               double gamma, int j) {
  if (orthogonal_kind(kind)) {
    BlockClassification c = classify_block(mats, 0.0);
    return build_spread_target(mats, j, eps, c.row_min(j), gamma);
  }
  if (dim == 2) return build_extremal_target(mats, eps, gamma);
  if (dim == 3) {
    if (j == 2) return build_3x3_target_23(mats, eps, gamma);
    return build_3x3_target(mats, eps, gamma);
  }
  fail(ErrorKind::Precondition,
       "bookkeeping: constructive targets need d in {2,3} or an orthogonal "
       "sequence");
}

}  // namespace

BookkeepingTrace bookkeeping_simulation(const ExperimentConfig& config,
                                        double gamma, uint64_t block_len,
                                        uint64_t n, uint64_t stream) {
  config.validate();
  const int d = config.dim;
  const double eps = config.epsilon;
  if (!(eps > 0.0))
    fail(ErrorKind::Precondition, "bookkeeping: epsilon must be positive");
  if (block_len < 2)
    fail(ErrorKind::Precondition, "bookkeeping: block length N must be >= 2");

  SequenceSource seq = config.make_sequence();
  PerturbationModel model{d, eps, config.seed, stream};

  BookkeepingTrace t;
  t.dim = d;
  t.epsilon = eps;
  t.gamma = gamma;
  t.block_len = block_len;
  t.n = n;
  t.j = config.gap_index == 0 ? 1 : config.gap_index;
  t.k = t.j + 1;
  t.decompose_all = config.decompose_all_targets;

  const double radius = std::pow(eps / 4.0, static_cast<double>(block_len)) /
                        (3.0 * d * static_cast<double>(block_len));
  t.log_ball_radius = std::log(radius);
  t.log_p_paper =
      static_cast<double>(d) * d * block_len * block_len * std::log(eps / 4.0) -
      static_cast<double>(d) * d * block_len *
          std::log(3.0 * d * static_cast<double>(block_len));

  // Targets come from the initialized sequence; hits are measured against
  // the raw perturbed one.
  std::set<uint64_t> transition_set;
  t.log_hit_floor_per_block = 0.0;
  const uint64_t n_blocks = n >= block_len ? n / block_len : 0;
  for (uint64_t l = 0; l * block_len + block_len - 1 <= n && l < n_blocks; ++l) {
    std::vector<Matrix> mats;
    mats.reserve(block_len - 1);
    for (uint64_t i = 1; i < block_len; ++i)
      mats.push_back(nonsingular_init(seq.at(l * block_len + i), eps));

    TargetBlock target;
    try {
      target = build_block_target(mats, d, config.sequence_kind, eps, gamma, t.j);
    } catch (const Error& e) {
      fail(e.kind(), "bookkeeping: target construction failed on block " +
                         std::to_string(l) + ": " + e.what());
    }

    BookkeepingTrace::BlockRecord rec;
    rec.block = l;
    rec.first = l * block_len + target.first;
    rec.last = l * block_len + target.last;
    rec.cert_log_ratio = target.certified.log_ratio;

    rec.hit = true;
    for (uint64_t i = rec.first; i <= rec.last; ++i) {
      Matrix perturbed = seq.at(i) + model.sample(i);
      if ((perturbed - target.matrices[static_cast<size_t>(i - rec.first)])
              .inf_abs() > radius) {
        rec.hit = false;
        break;
      }
    }
    if (rec.hit) ++t.hits;

    double floor = static_cast<double>(d) * d *
                   static_cast<double>(rec.last - rec.first + 1) *
                   std::log(radius / eps);
    t.log_hit_floor_per_block = std::min(t.log_hit_floor_per_block, floor);

    if (rec.hit || config.decompose_all_targets) {
      if (rec.first > 1) transition_set.insert(rec.first - 1);
      if (rec.last < n) transition_set.insert(rec.last + 1);
    }
    t.blocks.push_back(rec);
  }

  t.transitions.assign(transition_set.begin(), transition_set.end());

  // Decomposition bookkeeping. Every F term needs the log-gap of a combined
  // product L*A*R that is also a prefix of the full run, so the same value
  // enters twice; to keep the residual an honest consistency check, the
  // quantities come from accumulators with different renormalization
  // periods (independent numerical paths for the same product).
  auto gap_of = [&](const Vec& lsv) { return lsv[t.j - 1] - lsv[t.k - 1]; };

  ProductAccumulator full_side(d, 16);    // left-hand side of the identity
  ProductAccumulator glue_side(d, 24);    // prefixes inside the F terms
  ProductAccumulator segment(d, 8);       // the B_i between transitions
  std::vector<double> g_prefix_at;        // G(prefix to T_i - 1), glue path
  std::vector<double> g_segments;
  size_t next_t = 0;
  for (uint64_t i = 1; i <= n; ++i) {
    const bool is_transition =
        next_t < t.transitions.size() && t.transitions[next_t] == i;
    if (is_transition) {
      g_prefix_at.push_back(gap_of(glue_side.log_singular_values()));
      g_segments.push_back(gap_of(segment.log_singular_values()));
      segment = ProductAccumulator(d, 8);
      ++next_t;
    }
    Matrix perturbed = seq.at(i) + model.sample(i);
    full_side.advance(perturbed);
    glue_side.advance(perturbed);
    if (!is_transition) segment.advance(perturbed);
  }
  t.g_total = gap_of(full_side.log_singular_values());
  const double g_total_glue = gap_of(glue_side.log_singular_values());
  t.g_tail = gap_of(segment.log_singular_values());
  t.g_segments = g_segments;

  // F_i = G(prefix(T_{i+1}-1)) - G(B_{i+1}) - G(prefix(T_i-1)); the last one
  // closes against the full product and the tail segment.
  const size_t L = t.transitions.size();
  double sum = t.g_tail;
  for (size_t i = 0; i < L; ++i) {
    double g_before = g_prefix_at[i];
    double g_piece = i + 1 < L ? g_segments[i + 1] : t.g_tail;
    double g_after = i + 1 < L ? g_prefix_at[i + 1] : g_total_glue;
    double f = g_after - g_piece - g_before;
    t.f_transitions.push_back(f);
    sum += f;
  }
  for (size_t i = 0; i < L; ++i) sum += g_segments[i];
  if (L == 0) sum = t.g_tail;
  t.residual = t.g_total - sum;

  if (!t.g_segments.empty()) {
    double acc = 0.0;
    for (double g : t.g_segments) acc += g;
    t.mean_segment_g = acc / static_cast<double>(t.g_segments.size());
  }
  return t;
}

std::string trace_to_json(const BookkeepingTrace& t) {
  nlohmann::json j;
  j["dim"] = t.dim;
  j["epsilon"] = t.epsilon;
  j["gamma"] = t.gamma;
  j["block_len"] = t.block_len;
  j["n"] = t.n;
  j["j"] = t.j;
  j["k"] = t.k;
  j["hits"] = t.hits;
  j["blocks_total"] = t.blocks.size();
  j["log_ball_radius"] = t.log_ball_radius;
  j["log_hit_floor_per_block"] = t.log_hit_floor_per_block;
  j["log_p_paper"] = t.log_p_paper;
  j["residual"] = t.residual;
  j["g_total"] = t.g_total;
  j["g_tail"] = t.g_tail;
  j["mean_segment_g"] = t.mean_segment_g;
  j["decompose_all"] = t.decompose_all;
  j["transitions"] = t.transitions;
  j["g_segments"] = t.g_segments;
  j["f_transitions"] = t.f_transitions;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : t.blocks) {
    blocks.push_back({{"block", b.block},
                      {"first", b.first},
                      {"last", b.last},
                      {"cert_log_ratio", b.cert_log_ratio},
                      {"hit", b.hit}});
  }
  j["blocks"] = blocks;
  return j.dump(2);
}

}  // namespace lyapgap
