#pragma once

#include <array>
#include <cstdint>

#include "matcore/matrix.hpp"

namespace lyapgap {

// Philox4x32-10 counter block (Salmon et al., SC 2011). Counter-based so
// that perturbations are random-access: trials fan out over stream ids and
// individual steps can be resampled without replaying a sequence.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Uniform double in [-1, 1) addressed by (seed, stream, step, index).
// Distinct tuples map to distinct Philox (counter, key) pairs.
double uniform_pm1(uint64_t seed, uint64_t stream, uint64_t step,
                   uint32_t index);

// Additive perturbation model: entrywise i.i.d. uniform on [-1,1] scaled by
// epsilon. Identical (seed, stream_id, n) reproduce the same matrix bit for
// bit.
struct PerturbationModel {
  int dim = 2;
  double epsilon = 0.0;  // in [0, 1); 0 disables the noise
  uint64_t seed = 0;
  uint64_t stream_id = 0;

  void validate() const;

  // Perturbation eps * Xi_n for step n >= 1; entries lie in [-eps, eps].
  Matrix sample(uint64_t n) const;

  PerturbationModel with_stream(uint64_t stream) const {
    PerturbationModel m = *this;
    m.stream_id = stream;
    return m;
  }
};

}  // namespace lyapgap
