#include "harness/generators.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cocycle/accumulator.hpp"
#include "cocycle/philox.hpp"
#include "matcore/svd.hpp"
#include "targets/builders.hpp"

namespace lyapgap {

namespace {

// Generator draws live in their own stream namespace so they never collide
// with perturbation streams.
constexpr uint64_t kGeneratorStream = 0x67656e2d73657100ull;  // "gen-seq"

double gaussian_at(uint64_t seed, uint64_t index, uint32_t lane) {
  // Box-Muller on counter-based uniforms.
  double u = 0.5 * (uniform_pm1(seed, kGeneratorStream, index, 2 * lane) + 1.0);
  double v = 0.5 * (uniform_pm1(seed, kGeneratorStream, index, 2 * lane + 1) + 1.0);
  u = std::max(u, 1e-300);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

// diag(1, sigma, ..., sigma): ties every trailing singular value, so the
// unperturbed sequence carries no (j, j+1)-gap beyond j = 1, and the block
// realignment feeds the expanding direction into the contracting one.
Matrix contraction_profile(int d, double sigma) {
  Vec s(d);
  s[0] = 1.0;
  for (int i = 1; i < d; ++i) s[i] = sigma;
  return Matrix::diagonal(s);
}

}  // namespace

Matrix orthogonal_at(int dim, uint64_t seed, uint64_t index) {
  std::vector<Vec> cols;
  uint32_t lane = 0;
  while (static_cast<int>(cols.size()) < dim) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gaussian_at(seed, index, lane++);
    for (const Vec& b : cols) v = v - b * v.dot(b);
    if (v.norm() > 1e-8) {
      // positive-diagonal convention keeps the draw Haar-like
      Vec u = v.normalized();
      if (u[static_cast<int>(cols.size())] < 0.0) u = u * -1.0;
      cols.push_back(u);
    }
  }
  Matrix q(dim);
  for (int j = 0; j < dim; ++j) q.set_col(j, cols[static_cast<size_t>(j)]);
  return q;
}

std::vector<Matrix> read_matrix_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open sequence file: " + path);
  std::vector<Matrix> mats;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Matrix m(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (!(ls >> m.at(i, j)))
          fail(ErrorKind::Parse, "sequence file line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(dim * dim) +
                                     " decimals");
    double extra;
    if (ls >> extra)
      fail(ErrorKind::Parse, "sequence file line " + std::to_string(line_no) +
                                 ": trailing values");
    if (operator_norm(m) > 1.0 + 1e-12)
      fail(ErrorKind::InvalidArgument,
           "sequence file: norm exceeds 1 at index " + std::to_string(mats.size() + 1));
    mats.push_back(m);
  }
  if (mats.empty()) fail(ErrorKind::Parse, "sequence file is empty: " + path);
  return mats;
}

SequenceSource generate_sequence(const std::string& kind,
                                 const GeneratorParams& params, int dim) {
  if (kind == "identity") {
    return SequenceSource::generator(
        dim, kind, [dim](uint64_t) { return Matrix::identity(dim); });
  }
  if (kind == "zero") {
    return SequenceSource::generator(
        dim, kind, [dim](uint64_t) { return Matrix::zero(dim); });
  }
  if (kind == "constant") {
    if (params.matrices.size() != 1)
      fail(ErrorKind::InvalidArgument, "constant generator needs one matrix");
    return SequenceSource::explicit_list(dim, params.matrices, true, kind);
  }
  if (kind == "orthogonal_random") {
    uint64_t seed = params.seed;
    return SequenceSource::generator(dim, kind, [dim, seed](uint64_t n) {
      return orthogonal_at(dim, seed, n);
    });
  }
  if (kind == "orthogonal_cyclic") {
    double angle = params.get("angle", 2.39996322972865332);
    return SequenceSource::generator(dim, kind, [dim, angle](uint64_t n) {
      int plane = static_cast<int>(n % static_cast<uint64_t>(dim - 1));
      return Matrix::plane_rotation(dim, plane, plane + 1, angle);
    });
  }
  if (kind == "rank_collapse") {
    Vec diag(dim);
    for (int i = 0; i < dim - 1; ++i) diag[i] = 1.0;
    Matrix crush = Matrix::diagonal(diag);
    Matrix quarter = Matrix::plane_rotation(dim, 0, dim - 1, M_PI / 4.0);
    return SequenceSource::generator(dim, kind, [crush, quarter](uint64_t n) {
      return n % 2 == 1 ? crush : quarter;
    });
  }
  if (kind == "bochi_align") {
    if (params.horizon == 0)
      fail(ErrorKind::InvalidArgument, "bochi_align needs a horizon");
    const uint64_t block = std::max<uint64_t>(2, static_cast<uint64_t>(params.get("L", 8)));
    const double sigma = params.get("sigma", 0.5);
    if (!(sigma > 0.0) || sigma > 1.0)
      fail(ErrorKind::InvalidArgument, "bochi_align: sigma must lie in (0,1]");
    Matrix contraction = contraction_profile(dim, sigma);

    // Precompute one realignment rotation per block by replaying the
    // unperturbed sequence; random access afterwards is O(1).
    const uint64_t blocks = (params.horizon + block - 1) / block + 1;
    auto rotations = std::make_shared<std::vector<Matrix>>();
    rotations->reserve(static_cast<size_t>(blocks));
    ProductAccumulator running(dim);
    for (uint64_t b = 0; b < blocks; ++b) {
      Matrix frame = running.left_frame();
      Matrix align = rotation_mapping(frame.col(0), frame.col(dim - 1));
      rotations->push_back(align);
      running.advance(align);
      for (uint64_t i = 1; i < block; ++i) running.advance(contraction);
    }
    return SequenceSource::generator(
        dim, kind,
        [rotations, contraction, block](uint64_t n) {
          uint64_t b = (n - 1) / block;
          if (b >= rotations->size()) b %= rotations->size();  // past horizon
          return (n - 1) % block == 0 ? (*rotations)[static_cast<size_t>(b)]
                                      : contraction;
        });
  }
  if (kind == "custom_file") {
    return SequenceSource::explicit_list(
        dim, read_matrix_file(params.file_path, dim), true, kind);
  }
  fail(ErrorKind::InvalidArgument, "unknown sequence generator: " + kind);
}

}  // namespace lyapgap
