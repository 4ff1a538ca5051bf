#include "gluing/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "cocycle/philox.hpp"
#include "error.hpp"
#include "matcore/svd.hpp"

namespace lyapgap {

namespace {

constexpr double kCondLimit = 1e12;

void check_indices(int d, int j, int k) {
  if (j < 1 || k <= j || k > d)
    fail(ErrorKind::InvalidArgument, "gluing: need 1 <= j < k <= d");
}

bool numerically_singular(const Matrix& m) {
  SvdTriple f = svd(m);
  return f.s[m.dim() - 1] <= 0.0 || f.s[0] / f.s[m.dim() - 1] >= kCondLimit;
}

}  // namespace

double log_gap_ratio(const Matrix& a, int j, int k) {
  check_indices(a.dim(), j, k);
  SvdTriple f = svd(a);
  if (f.s[k - 1] <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(f.s[j - 1]) - std::log(f.s[k - 1]);
}

double glue_statistic(const Matrix& l, const Matrix& a, const Matrix& r,
                      int j, int k) {
  check_indices(l.dim(), j, k);
  if (numerically_singular(l) || numerically_singular(r))
    fail(ErrorKind::Precondition, "glue statistic: L or R singular");
  double g_outer = log_gap_ratio(l * a * r, j, k);
  if (!std::isfinite(g_outer)) return g_outer;  // singular LAR, signalled
  return g_outer - log_gap_ratio(l, j, k) - log_gap_ratio(r, j, k);
}

GlueSample tail_profile(const Matrix& l, const Matrix& a, const Matrix& r,
                        int j, int k, double epsilon, uint64_t trials,
                        std::vector<double> x_grid, uint64_t seed,
                        uint64_t stream) {
  const int d = l.dim();
  check_indices(d, j, k);
  if (trials < 10000)
    fail(ErrorKind::Precondition, "tail profile: need at least 1e4 trials");
  if (operator_norm(a) > 1.0 + 1e-12)
    fail(ErrorKind::Precondition, "tail profile: ||A|| must be <= 1");
  if (numerically_singular(l) || numerically_singular(r))
    fail(ErrorKind::Precondition, "tail profile: L or R singular");

  PerturbationModel model{d, epsilon, seed, stream};
  model.validate();

  const double g_l = log_gap_ratio(l, j, k);
  const double g_r = log_gap_ratio(r, j, k);

  GlueSample out;
  out.dim = d;
  out.j = j;
  out.k = k;
  out.epsilon = epsilon;
  out.trials = trials;

  std::vector<double> samples;
  samples.reserve(trials);
  for (uint64_t t = 1; t <= trials; ++t) {
    double g = log_gap_ratio(l * (a + model.sample(t)) * r, j, k);
    if (!std::isfinite(g)) {
      ++out.saturated;
      continue;
    }
    samples.push_back(std::fabs(g - g_l - g_r));
  }
  std::sort(samples.begin(), samples.end());
  const double n_finite = static_cast<double>(samples.size());

  if (x_grid.empty()) {
    const double hi = samples.empty() ? 1.0 : samples.back() * 1.02 + 1e-12;
    for (int i = 0; i < 64; ++i)
      x_grid.push_back(hi * static_cast<double>(i) / 64.0);
  }
  out.x_grid = std::move(x_grid);

  for (double x : out.x_grid) {
    auto it = std::upper_bound(samples.begin(), samples.end(), x);
    out.tail.push_back(n_finite > 0.0
                           ? static_cast<double>(samples.end() - it) / n_finite
                           : 0.0);
  }

  // Log-linear regression on the decaying region.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t used = 0;
  for (size_t i = 0; i < out.x_grid.size(); ++i) {
    double p = out.tail[i];
    if (p < 1e-4 || p > 1e-1) continue;
    double x = out.x_grid[i], y = std::log(p);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  const double det = static_cast<double>(used) * sxx - sx * sx;
  if (used >= 2 && std::fabs(det) > 1e-12) {
    GlueFit fit;
    fit.points_used = used;
    const double slope = (static_cast<double>(used) * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / static_cast<double>(used);
    fit.rate = -slope;
    fit.zeta_fit = std::exp(intercept);
    for (size_t i = 0; i < out.x_grid.size(); ++i) {
      if (out.tail[i] <= 0.0) continue;
      fit.zeta_required =
          std::max(fit.zeta_required, epsilon * out.tail[i] *
                                          std::exp(out.x_grid[i] /
                                                   (4.0 * d)));
    }
    fit.zeta = std::max(fit.zeta_fit, fit.zeta_required);
    out.fitted = fit;
  }
  return out;
}

GlueMoments expectation_floor(const Matrix& l, const Matrix& a,
                              const Matrix& r, int j, int k, double epsilon,
                              uint64_t trials, uint64_t seed,
                              uint64_t stream) {
  const int d = l.dim();
  check_indices(d, j, k);
  if (numerically_singular(l) || numerically_singular(r))
    fail(ErrorKind::Precondition, "expectation floor: L or R singular");
  PerturbationModel model{d, epsilon, seed, stream};
  model.validate();

  const double g_l = log_gap_ratio(l, j, k);
  const double g_r = log_gap_ratio(r, j, k);

  GlueMoments out;
  double sum = 0.0, sumsq = 0.0;
  for (uint64_t t = 1; t <= trials; ++t) {
    double g = log_gap_ratio(l * (a + model.sample(t)) * r, j, k);
    if (!std::isfinite(g)) {
      ++out.saturated;
      continue;
    }
    double f = g - g_l - g_r;
    sum += f;
    sumsq += f * f;
    ++out.count;
  }
  if (out.count == 0)
    fail(ErrorKind::Accumulation, "expectation floor: no finite samples");
  const double n = static_cast<double>(out.count);
  out.mean = sum / n;
  const double var = std::max(0.0, sumsq / n - out.mean * out.mean);
  out.std_error = std::sqrt(var / n);
  return out;
}

std::string glue_sample_to_csv(const GlueSample& s) {
  std::string text = "x,tail,bound\n";
  for (size_t i = 0; i < s.x_grid.size(); ++i) {
    double bound = 1.0;
    if (s.fitted)
      bound = std::min(1.0, s.fitted->zeta *
                                std::exp(-s.x_grid[i] / (4.0 * s.dim)) /
                                s.epsilon);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.x_grid[i],
                  s.tail[i], bound);
    text += buf;
  }
  return text;
}

std::string glue_sample_to_json(const GlueSample& s) {
  nlohmann::json out;
  out["dim"] = s.dim;
  out["j"] = s.j;
  out["k"] = s.k;
  out["epsilon"] = s.epsilon;
  out["trials"] = s.trials;
  out["saturated"] = s.saturated;
  out["x"] = s.x_grid;
  out["tail"] = s.tail;
  if (s.fitted) {
    out["fit"] = {{"zeta", s.fitted->zeta},
                  {"rate", s.fitted->rate},
                  {"zeta_fit", s.fitted->zeta_fit},
                  {"zeta_required", s.fitted->zeta_required},
                  {"points_used", s.fitted->points_used}};
  }
  return out.dump();
}

GlueSample glue_sample_from_json(const std::string& text) {
  GlueSample s;
  try {
    nlohmann::json in = nlohmann::json::parse(text);
    s.dim = in.at("dim").get<int>();
    s.j = in.at("j").get<int>();
    s.k = in.at("k").get<int>();
    s.epsilon = in.at("epsilon").get<double>();
    s.trials = in.at("trials").get<uint64_t>();
    s.saturated = in.at("saturated").get<uint64_t>();
    s.x_grid = in.at("x").get<std::vector<double>>();
    s.tail = in.at("tail").get<std::vector<double>>();
    if (in.contains("fit")) {
      GlueFit f;
      f.zeta = in["fit"].at("zeta").get<double>();
      f.rate = in["fit"].at("rate").get<double>();
      f.zeta_fit = in["fit"].at("zeta_fit").get<double>();
      f.zeta_required = in["fit"].at("zeta_required").get<double>();
      f.points_used = in["fit"].at("points_used").get<size_t>();
      s.fitted = f;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("glue sample json: ") + e.what());
  }
  return s;
}

}  // namespace lyapgap
