#pragma once

#include <array>
#include <cstdint>

#include "matcore/matrix.hpp"

namespace lyapgap {

// Numerically stable running factorization of the product M_n ... M_1.
//
// State is a carrier matrix W together with per-column log scales l, with
// the invariant that the singular values of the true product equal those of
// W * diag(exp(l)) (the dropped right orthogonal factor cannot change them).
// Every renorm_period steps the pair is re-diagonalized by a one-sided
// Jacobi that works on unit columns and log norms, so products of length
// 10^6 with singular values far outside double range stay representable.
//
// Single-owner mutable state; movable between threads, never shared.
class ProductAccumulator {
 public:
  explicit ProductAccumulator(int dim, int renorm_period = 16);

  int dim() const { return dim_; }
  uint64_t step() const { return step_; }

  // Left-multiplies the represented product by m. Accumulation error if the
  // carrier leaves double range despite renormalization.
  void advance(const Matrix& m);

  // Log singular values of the accumulated product, descending. Works on a
  // copy, so it can be called at any step.
  Vec log_singular_values() const;

  // Orthonormal frame of left singular directions (columns ordered by
  // descending singular value). Also a copy-based read.
  Matrix left_frame() const;

 private:
  void fold_column_norms();
  void diagonalize();

  int dim_;
  int renorm_period_;
  uint64_t step_ = 0;
  int since_renorm_ = 0;
  Matrix carrier_;
  std::array<double, kMaxDim> log_scales_{};
};

}  // namespace lyapgap
