#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cocycle/sequence.hpp"

namespace lyapgap {

struct GeneratorParams {
  std::map<std::string, double> values;  // numeric knobs (L, sigma, angle...)
  std::string file_path;                 // custom_file source
  std::vector<Matrix> matrices;          // constant / explicit entries
  uint64_t seed = 0;                     // randomized generators
  uint64_t horizon = 0;                  // bochi_align precompute length

  double get(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
};

// Named adversarial and reference sequences, all of norm at most 1:
//   identity, zero, constant, orthogonal_random, orthogonal_cyclic,
//   rank_collapse, bochi_align, custom_file.
// bochi_align realigns the running product's top singular direction onto the
// image of the bottom one at the start of every length-L block, then
// contracts with diag(1, sigma, ..., sigma^{d-1}); it needs `horizon`.
SequenceSource generate_sequence(const std::string& kind,
                                 const GeneratorParams& params, int dim);

// Haar-like random orthogonal matrix addressed by (seed, index), via
// Gram-Schmidt of counter-based Gaussians with a positive-diagonal fix.
Matrix orthogonal_at(int dim, uint64_t seed, uint64_t index);

// One matrix per line, d*d decimals, row-major. Parse errors carry the line
// number; norm violations the index.
std::vector<Matrix> read_matrix_file(const std::string& path, int dim);

}  // namespace lyapgap
