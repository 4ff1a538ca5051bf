#include "cocycle/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace lyapgap {

SampleSchedule SampleSchedule::every(uint64_t k) {
  SampleSchedule s;
  s.kind = Kind::EveryK;
  s.param = static_cast<double>(k);
  return s;
}

SampleSchedule SampleSchedule::geometric(double ratio) {
  if (!(ratio > 1.0))
    fail(ErrorKind::InvalidArgument, "schedule ratio must exceed 1");
  SampleSchedule s;
  s.kind = Kind::Geometric;
  s.param = ratio;
  return s;
}

std::vector<uint64_t> SampleSchedule::points(uint64_t n_max) const {
  std::vector<uint64_t> pts;
  if (n_max == 0) fail(ErrorKind::Precondition, "n_max must be >= 1");
  if (kind == Kind::EveryK) {
    uint64_t k = std::max<uint64_t>(1, static_cast<uint64_t>(param));
    for (uint64_t n = k; n < n_max; n += k) pts.push_back(n);
  } else {
    double x = 1.0;
    while (static_cast<uint64_t>(x) < n_max) {
      uint64_t n = static_cast<uint64_t>(x);
      if (pts.empty() || pts.back() != n) pts.push_back(n);
      x = std::max(x * param, x + 1.0);
    }
  }
  if (pts.empty() || pts.back() != n_max) pts.push_back(n_max);
  return pts;
}

GapTrajectory gap_trajectory(const SequenceSource& seq,
                             const PerturbationModel& model, uint64_t n_max,
                             const SampleSchedule& schedule,
                             int renorm_period) {
  if (seq.dim() != model.dim)
    fail(ErrorKind::InvalidArgument, "gap_trajectory: dimension mismatch");
  model.validate();
  const int d = seq.dim();
  GapTrajectory out;
  out.dim = d;
  std::vector<uint64_t> pts = schedule.points(n_max);

  ProductAccumulator acc(d, renorm_period);
  size_t next = 0;
  for (uint64_t n = 1; n <= n_max; ++n) {
    Matrix a = seq.at(n);
    if (model.epsilon > 0.0) a = a + model.sample(n);
    acc.advance(a);
    if (next < pts.size() && pts[next] == n) {
      Vec lsv = acc.log_singular_values();
      std::vector<double> g(static_cast<size_t>(d - 1));
      for (int j = 0; j + 1 < d; ++j)
        g[static_cast<size_t>(j)] = (lsv[j] - lsv[j + 1]) / static_cast<double>(n);
      out.steps.push_back(n);
      out.gaps.push_back(std::move(g));
      ++next;
    }
  }
  return out;
}

std::vector<double> liminf_proxy(const GapTrajectory& t) {
  if (t.steps.empty())
    fail(ErrorKind::InvalidArgument, "liminf proxy of empty trajectory");
  const uint64_t n_max = t.steps.back();
  const uint64_t lo = n_max / 2;
  const int m = t.dim - 1;
  std::vector<double> result(static_cast<size_t>(m),
                             std::numeric_limits<double>::infinity());

  // decade -> (sum, count) per gap index
  struct Bucket {
    std::vector<double> sum;
    uint64_t count = 0;
  };
  std::vector<std::pair<int, Bucket>> buckets;
  for (size_t i = 0; i < t.steps.size(); ++i) {
    if (t.steps[i] <= lo && t.steps[i] != n_max) continue;
    int dec = static_cast<int>(std::floor(std::log10(static_cast<double>(t.steps[i]))));
    auto it = std::find_if(buckets.begin(), buckets.end(),
                           [&](const auto& b) { return b.first == dec; });
    if (it == buckets.end()) {
      buckets.push_back({dec, Bucket{std::vector<double>(static_cast<size_t>(m), 0.0), 0}});
      it = buckets.end() - 1;
    }
    for (int j = 0; j < m; ++j) it->second.sum[static_cast<size_t>(j)] += t.gaps[i][static_cast<size_t>(j)];
    it->second.count += 1;
  }
  for (const auto& [dec, b] : buckets) {
    (void)dec;
    for (int j = 0; j < m; ++j)
      result[static_cast<size_t>(j)] = std::min(
          result[static_cast<size_t>(j)],
          b.sum[static_cast<size_t>(j)] / static_cast<double>(b.count));
  }
  return result;
}

PrefixInvariance prefix_invariance_check(const SequenceSource& seq,
                                         const PerturbationModel& model,
                                         uint64_t m, uint64_t n_max, int j,
                                         const SampleSchedule& schedule) {
  if (m >= n_max)
    fail(ErrorKind::Precondition, "prefix length must be below n_max");
  if (j < 1 || j >= seq.dim())
    fail(ErrorKind::InvalidArgument, "gap index out of range");
  model.validate();
  const int d = seq.dim();

  GapTrajectory full = gap_trajectory(seq, model, n_max, schedule);
  PrefixInvariance out;
  out.gap_full = liminf_proxy(full)[static_cast<size_t>(j - 1)];

  if (m == 0) {
    out.gap_shifted = out.gap_full;
    return out;
  }

  // Prefix product: extreme partial singular-value products S_i^k.
  ProductAccumulator pre(d);
  for (uint64_t n = 1; n <= m; ++n) {
    Matrix a = seq.at(n);
    if (model.epsilon > 0.0) a = a + model.sample(n);
    pre.advance(a);
  }
  Vec lsv = pre.log_singular_values();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < d; ++i) {
    double run = 0.0;
    for (int k = i; k < d; ++k) {
      run += lsv[k];
      lo = std::min(lo, run);
      hi = std::max(hi, run);
    }
  }
  if (!std::isfinite(lo))
    fail(ErrorKind::Accumulation, "prefix product numerically singular");
  out.prefix_log_min = lo;
  out.prefix_log_max = hi;

  // Shifted run: same perturbation indices. Sampled at the same absolute
  // steps as the full run (so the liminf-proxy windows line up) but with its
  // own Lyapunov normalization 1/(n - m).
  ProductAccumulator acc(d);
  std::vector<uint64_t> pts = schedule.points(n_max);
  GapTrajectory shifted;
  shifted.dim = d;
  size_t next = 0;
  while (next < pts.size() && pts[next] <= m) ++next;
  for (uint64_t n = m + 1; n <= n_max; ++n) {
    Matrix a = seq.at(n);
    if (model.epsilon > 0.0) a = a + model.sample(n);
    acc.advance(a);
    if (next < pts.size() && pts[next] == n) {
      Vec l = acc.log_singular_values();
      std::vector<double> g(static_cast<size_t>(d - 1));
      for (int jj = 0; jj + 1 < d; ++jj)
        g[static_cast<size_t>(jj)] =
            (l[jj] - l[jj + 1]) / static_cast<double>(n - m);
      shifted.steps.push_back(n);
      shifted.gaps.push_back(std::move(g));
      ++next;
    }
  }
  out.gap_shifted = liminf_proxy(shifted)[static_cast<size_t>(j - 1)];
  return out;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trajectory_to_csv(const GapTrajectory& t) {
  std::ostringstream os;
  os << "n";
  for (int j = 1; j < t.dim; ++j) os << ",gap_" << j;
  os << "\n";
  for (size_t i = 0; i < t.steps.size(); ++i) {
    os << t.steps[i];
    for (double g : t.gaps[i]) os << "," << format_g17(g);
    os << "\n";
  }
  return os.str();
}

GapTrajectory trajectory_from_csv(const std::string& text) {
  GapTrajectory t;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line))
    fail(ErrorKind::Parse, "trajectory csv: missing header");
  t.dim = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string cell;
    if (!std::getline(ls, cell, ','))
      fail(ErrorKind::Parse, "trajectory csv: bad row");
    t.steps.push_back(std::stoull(cell));
    std::vector<double> g;
    while (std::getline(ls, cell, ',')) g.push_back(std::stod(cell));
    if (static_cast<int>(g.size()) != t.dim - 1)
      fail(ErrorKind::Parse, "trajectory csv: wrong column count");
    t.gaps.push_back(std::move(g));
  }
  return t;
}

std::string trajectory_to_json(const GapTrajectory& t) {
  nlohmann::json j;
  j["dim"] = t.dim;
  j["steps"] = t.steps;
  j["gaps"] = t.gaps;
  return j.dump();
}

GapTrajectory trajectory_from_json(const std::string& text) {
  GapTrajectory t;
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    t.dim = j.at("dim").get<int>();
    t.steps = j.at("steps").get<std::vector<uint64_t>>();
    t.gaps = j.at("gaps").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("trajectory json: ") + e.what());
  }
  return t;
}

}  // namespace lyapgap
