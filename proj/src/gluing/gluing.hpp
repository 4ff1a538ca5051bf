#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matcore/matrix.hpp"

namespace lyapgap {

// log q_{j,k}(A) = log(s_j(A) / s_k(A)) >= 0 for j < k.
double log_gap_ratio(const Matrix& a, int j, int k);

// Gluing statistic F(L, A, R) = log q(LAR) - log q(L) - log q(R): the defect
// of additivity of the log-gap across a junction. Precondition error when L
// or R is numerically singular; +infinity signals a singular LAR.
double glue_statistic(const Matrix& l, const Matrix& a, const Matrix& r,
                      int j, int k);

struct GlueFit {
  double zeta = 0.0;       // reported constant: max(zeta_fit, zeta_required)
  double rate = 0.0;       // fitted decay rate of the tail
  double zeta_fit = 0.0;   // exp(intercept) of the log-linear regression
  double zeta_required = 0.0;  // smallest zeta making the bound pointwise
  size_t points_used = 0;
};

struct GlueSample {
  int dim = 0;
  int j = 1;
  int k = 2;
  double epsilon = 0.0;
  uint64_t trials = 0;
  uint64_t saturated = 0;  // infinite statistics, excluded from the tail
  std::vector<double> x_grid;
  std::vector<double> tail;  // empirical P(|F| > X) over finite samples
  std::optional<GlueFit> fitted;  // absent when the tail is degenerate
};

// Monte Carlo tail of |F(L, A + eps*Xi, R)| over `trials` i.i.d. draws.
// The regression runs on the decaying region P in [1e-4, 1e-1]; the
// reported zeta additionally dominates every grid point, so
// P(|F| > X) <= min(1, zeta * exp(-X/(4d)) / eps) holds as stated.
// Preconditions: trials >= 1e4, ||A|| <= 1.
GlueSample tail_profile(const Matrix& l, const Matrix& a, const Matrix& r,
                        int j, int k, double epsilon, uint64_t trials,
                        std::vector<double> x_grid = {}, uint64_t seed = 0,
                        uint64_t stream = 0);

struct GlueMoments {
  double mean = 0.0;
  double std_error = 0.0;
  uint64_t count = 0;
  uint64_t saturated = 0;
};

// Sample mean of F with its standard error; the floor it is measured
// against is 4d log(eps) - K with K = 4d(log zeta + 1) from a tail fit
// (integrate the tail bound min(1, zeta e^{-X/(4d)} / eps) to get K).
GlueMoments expectation_floor(const Matrix& l, const Matrix& a,
                              const Matrix& r, int j, int k, double epsilon,
                              uint64_t trials, uint64_t seed = 0,
                              uint64_t stream = 0);

std::string glue_sample_to_csv(const GlueSample& s);
std::string glue_sample_to_json(const GlueSample& s);
GlueSample glue_sample_from_json(const std::string& text);

}  // namespace lyapgap
