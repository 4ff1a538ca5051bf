#include "harness/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "error.hpp"
#include "matcore/matrix.hpp"

namespace lyapgap {

namespace {

double log_sum_exp(std::initializer_list<double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

BoundReport compute_bound_constants(int dim, double epsilon, double zeta,
                                    int j, int k, const std::string& mode) {
  if (dim < kMinDim || dim > kMaxDim)
    fail(ErrorKind::InvalidArgument, "constants: dim out of range");
  if (!(epsilon > 0.0) || epsilon >= 1.0)
    fail(ErrorKind::InvalidArgument, "constants: epsilon must lie in (0,1)");
  if (!(zeta > 0.0))
    fail(ErrorKind::Precondition, "constants: zeta must be positive");
  if (k == 0) k = dim;
  if (j < 1 || k <= j || k > dim)
    fail(ErrorKind::InvalidArgument, "constants: need 1 <= j < k <= d");

  BoundReport r;
  r.dim = dim;
  r.epsilon = epsilon;
  r.zeta = zeta;
  r.mode = mode;
  r.j = j;
  r.k = k;

  const double d = dim;
  r.k_const = 4.0 * d * (std::log(zeta) + 1.0);
  r.lambda_floor = 4.0 * d * std::log(epsilon) - r.k_const;
  r.log_gamma = std::log(2.0) + 2.0 + 2.0 * std::fabs(r.lambda_floor);

  // Block length of the construction that serves this pair.
  double log_len;  // log(N - 1)
  if (mode == "orthogonal") {
    if (k != j + 1)
      fail(ErrorKind::InvalidArgument,
           "constants: orthogonal mode serves consecutive pairs");
    // Every block is sqrt(2)-spread, so the boost runs at eta = sqrt(2).
    log_len = std::log(16.0 * r.log_gamma / std::sqrt(2.0)) - std::log(epsilon);
  } else if (dim == 3 && k == j + 1) {
    // Full 3x3 dispatch with eta = min(Gamma^-9, eps/4).
    double log_eta =
        std::min(-9.0 * r.log_gamma, std::log(epsilon / 4.0));
    log_len = std::log(16.0 * r.log_gamma) - std::log(epsilon) - 2.0 * log_eta;
  } else if (j == 1 && k == dim) {
    // Extremal construction: N - 1 >= (16/eps) Gamma log Gamma.
    log_len = std::log(16.0 / epsilon) + r.log_gamma + std::log(r.log_gamma);
  } else {
    fail(ErrorKind::InvalidArgument,
         "constants: no constructive target for this pair in general mode");
  }
  r.log_block_len =
      log_len < 34.0 ? std::log(std::exp(log_len) + 1.0) : log_len;

  // p = (eps/4)^{d^2 N^2} / (3dN)^{d^2 N}; log(1/p) and log(1/c) only fit a
  // double in doubly logarithmic form.
  const double t1 = std::log(d * d) + 2.0 * r.log_block_len +
                    std::log(std::log(4.0 / epsilon));
  const double t2 = std::log(d * d) + r.log_block_len +
                    std::log(std::log(3.0 * d) + r.log_block_len);
  r.log_log_inv_p = log_sum_exp({t1, t2});
  r.log_log_inv_c = log_sum_exp({t1, t2, std::log(r.log_block_len)});

  r.log_p = r.log_log_inv_p < 709.0
                ? -std::exp(r.log_log_inv_p)
                : -std::numeric_limits<double>::infinity();
  r.log_c = r.log_log_inv_c < 709.0
                ? -std::exp(r.log_log_inv_c)
                : -std::numeric_limits<double>::infinity();
  r.exponent_ratio = r.log_log_inv_c / std::log(1.0 / epsilon);
  return r;
}

std::string bound_report_to_json(const BoundReport& r) {
  nlohmann::json j;
  j["dim"] = r.dim;
  j["epsilon"] = r.epsilon;
  j["zeta"] = r.zeta;
  j["mode"] = r.mode;
  j["j"] = r.j;
  j["k"] = r.k;
  j["k_const"] = r.k_const;
  j["lambda_floor"] = r.lambda_floor;
  j["log_gamma"] = r.log_gamma;
  j["log_block_len"] = r.log_block_len;
  j["log_log_inv_p"] = r.log_log_inv_p;
  j["log_log_inv_c"] = r.log_log_inv_c;
  j["log_p"] = std::isfinite(r.log_p) ? nlohmann::json(r.log_p)
                                      : nlohmann::json("-inf");
  j["log_c"] = std::isfinite(r.log_c) ? nlohmann::json(r.log_c)
                                      : nlohmann::json("-inf");
  j["exponent_ratio"] = r.exponent_ratio;
  return j.dump(2);
}

}  // namespace lyapgap
