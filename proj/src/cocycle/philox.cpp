#include "cocycle/philox.hpp"

#include <cmath>

#include "error.hpp"

namespace lyapgap {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> c,
                                   std::array<uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kPhiloxM0, c[0], hi0, lo0);
    mul_hi_lo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

double uniform_pm1(uint64_t seed, uint64_t stream, uint64_t step,
                   uint32_t index) {
  // Two doubles per block; the block index is folded into the key, which
  // Philox treats as an independent stream selector.
  const uint32_t block = index >> 1;
  std::array<uint32_t, 4> ctr = {
      static_cast<uint32_t>(step), static_cast<uint32_t>(step >> 32),
      static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
  std::array<uint32_t, 2> key = {
      static_cast<uint32_t>(seed) + block * kPhiloxW0,
      static_cast<uint32_t>(seed >> 32) + block * kPhiloxW1};
  std::array<uint32_t, 4> out = philox4x32(ctr, key);
  const int lane = static_cast<int>(index & 1u) * 2;
  uint64_t bits = (static_cast<uint64_t>(out[static_cast<size_t>(lane)]) << 32) |
                  out[static_cast<size_t>(lane + 1)];
  double u01 = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
  return 2.0 * u01 - 1.0;
}

void PerturbationModel::validate() const {
  if (dim < kMinDim || dim > kMaxDim)
    fail(ErrorKind::InvalidArgument, "perturbation model: dim out of range");
  if (!(epsilon >= 0.0) || epsilon >= 1.0)
    fail(ErrorKind::InvalidArgument,
         "perturbation model: epsilon must lie in [0, 1)");
}

Matrix PerturbationModel::sample(uint64_t n) const {
  if (n == 0)
    fail(ErrorKind::Precondition, "perturbation step index starts at 1");
  Matrix xi(dim);
  if (epsilon == 0.0) return xi;
  uint32_t idx = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      xi.at(i, j) = epsilon * uniform_pm1(seed, stream_id, n, idx++);
  return xi;
}

}  // namespace lyapgap
