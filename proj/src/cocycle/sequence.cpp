#include "cocycle/sequence.hpp"

#include "matcore/svd.hpp"

namespace lyapgap {

SequenceSource SequenceSource::explicit_list(int dim, std::vector<Matrix> mats,
                                             bool norm_le_one,
                                             const std::string& name) {
  if (mats.empty())
    fail(ErrorKind::InvalidArgument, "sequence: empty explicit list");
  for (size_t i = 0; i < mats.size(); ++i) {
    if (mats[i].dim() != dim)
      fail(ErrorKind::InvalidArgument,
           "sequence: dimension mismatch at index " + std::to_string(i + 1));
    if (!mats[i].finite())
      fail(ErrorKind::InvalidArgument,
           "sequence: non-finite entries at index " + std::to_string(i + 1));
    if (norm_le_one && operator_norm(mats[i]) > 1.0 + 1e-12)
      fail(ErrorKind::InvalidArgument,
           "sequence: norm exceeds 1 at index " + std::to_string(i + 1));
  }
  SequenceSource s;
  s.dim_ = dim;
  s.norm_le_one_ = norm_le_one;
  s.name_ = name;
  s.list_ = std::make_shared<const std::vector<Matrix>>(std::move(mats));
  return s;
}

SequenceSource SequenceSource::generator(int dim, const std::string& name,
                                         std::function<Matrix(uint64_t)> rule,
                                         bool norm_le_one) {
  SequenceSource s;
  s.dim_ = dim;
  s.norm_le_one_ = norm_le_one;
  s.name_ = name;
  s.rule_ = std::move(rule);
  return s;
}

Matrix SequenceSource::at(uint64_t n) const {
  if (n == 0) fail(ErrorKind::Precondition, "sequence index starts at 1");
  if (list_) return (*list_)[static_cast<size_t>((n - 1) % list_->size())];
  return rule_(n);
}

}  // namespace lyapgap
