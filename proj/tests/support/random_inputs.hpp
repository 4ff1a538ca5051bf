#pragma once

// Deterministic random test inputs. Uses std::mt19937_64 on purpose: test
// fixtures should not depend on the library's own generator.

#include <random>

#include "matcore/matrix.hpp"
#include "matcore/subspace.hpp"
#include "matcore/svd.hpp"

namespace testing_support {

inline lyapgap::Matrix random_matrix(std::mt19937_64& rng, int d,
                                     double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  lyapgap::Matrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.at(i, j) = u(rng);
  return m;
}

// Operator norm at most 1: entrywise uniform scaled by its norm when needed.
inline lyapgap::Matrix random_contraction(std::mt19937_64& rng, int d) {
  lyapgap::Matrix m = random_matrix(rng, d);
  double n = lyapgap::operator_norm(m);
  if (n > 1.0) m = m * (1.0 / n);
  return m;
}

inline lyapgap::Vec random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  while (true) {
    lyapgap::Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = g(rng);
    if (v.norm() > 1e-6) return v.normalized();
  }
}

// Haar-ish random rotation from QR of a Gaussian matrix.
inline lyapgap::Matrix random_orthogonal(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<lyapgap::Vec> cols;
  while (static_cast<int>(cols.size()) < d) {
    lyapgap::Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = g(rng);
    for (const auto& b : cols) v = v - b * v.dot(b);
    if (v.norm() > 1e-8) cols.push_back(v.normalized());
  }
  lyapgap::Matrix q(d);
  for (int j = 0; j < d; ++j) q.set_col(j, cols[static_cast<size_t>(j)]);
  return q;
}

inline lyapgap::Subspace random_subspace(std::mt19937_64& rng, int d, int k) {
  std::vector<lyapgap::Vec> span;
  for (int i = 0; i < k; ++i) span.push_back(random_unit(rng, d));
  return lyapgap::Subspace::from_spanning(d, span);
}

}  // namespace testing_support
