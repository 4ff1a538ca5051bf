#pragma once

#include <vector>

#include "matcore/matrix.hpp"

namespace lyapgap {

// Linear subspace of R^d held as an orthonormal basis, 1 <= dim < d.
class Subspace {
 public:
  // Orthonormalizes the spanning set (modified Gram-Schmidt, two passes).
  // InvalidArgument if the set is empty, dependent, or fills the whole space.
  static Subspace from_spanning(int ambient_dim, const std::vector<Vec>& span);

  static Subspace span_of_axes(int ambient_dim, std::initializer_list<int> axes);

  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Vec>& basis() const { return basis_; }

  // Orthogonal projection of x onto the subspace.
  Vec project(const Vec& x) const;

 private:
  Subspace(int ambient, std::vector<Vec> basis)
      : ambient_(ambient), basis_(std::move(basis)) {}

  int ambient_;
  std::vector<Vec> basis_;
};

// Chord angle ||u/||u|| - v/||v|||| in [0, 2]. Domain error on zero vectors.
double angle(const Vec& u, const Vec& v);

// Chord angle minimised over the sign of v (singular vectors carry no sign).
double angle_min_sign(const Vec& u, const Vec& v);

// min ||e - f|| over unit e in E, f in F; zero iff the subspaces intersect.
// Equals sqrt(2 - 2 sigma_max(Qe^T Qf)), the chord of the smallest principal
// angle, which the sign orbit of the principal vectors attains.
double sphere_distance(const Subspace& e, const Subspace& f);

// Projection onto E along F for a direct sum E + F = R^d.
// DegenerateSum error when dim E + dim F != d or the combined basis has
// condition number >= 1e12. Norm is bounded by 2 / sphere_distance(E, F).
Matrix oblique_projection(const Subspace& e, const Subspace& f);

struct SphereSectionDistance {
  double linear;     // distance from u to the subspace V
  double spherical;  // distance from u to V intersected with the unit sphere
};

// Distances from a unit vector to V and to V's unit sphere section;
// spherical <= 2 * linear always. Domain error when u is not unit length.
SphereSectionDistance dist_to_sphere_section(const Vec& u, const Subspace& v);

}  // namespace lyapgap
