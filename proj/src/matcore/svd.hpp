#pragma once

#include "matcore/matrix.hpp"

namespace lyapgap {

// Factorization a = u * diag(s) * v^T with u, v orthogonal and s descending,
// s_i >= 0. Columns of v are the right singular vectors v_1..v_d.
struct SvdTriple {
  Matrix u;
  Vec s;
  Matrix v;

  Matrix reconstruct() const {
    return u * Matrix::diagonal(s) * v.transpose();
  }
};

// Deterministic SVD via one-sided Jacobi with a fixed sweep order.
//
// Conventions (fixed so repeated runs agree bit for bit):
//   - singular values sorted descending;
//   - within groups of singular values equal to 1e-12 relative accuracy the
//     right-singular basis is re-picked by projecting e_1, e_2, ... onto the
//     invariant subspace in canonical order;
//   - each right singular vector's first coordinate above 1e-12 in absolute
//     value is made positive (the sign flip is mirrored in u).
SvdTriple svd(const Matrix& a);

// Largest singular value.
double operator_norm(const Matrix& a);

// s_1 / s_d; +inf when numerically singular.
double condition_number(const Matrix& a);

// Inverse through the SVD. Singular error when condition_number >= cond_limit.
Matrix inverse(const Matrix& a, double cond_limit = 1e12);

}  // namespace lyapgap
