#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "matcore/matrix.hpp"

namespace lyapgap {

// A sequence (A_n)_{n>=1} of d x d matrices, either an explicit list
// (repeated cyclically) or a named generator rule. When the norm flag is on
// every produced matrix satisfies ||A_n|| <= 1 + 1e-12; explicit lists are
// checked at construction.
class SequenceSource {
 public:
  static SequenceSource explicit_list(int dim, std::vector<Matrix> mats,
                                      bool norm_le_one = true,
                                      const std::string& name = "explicit");

  static SequenceSource generator(int dim, const std::string& name,
                                  std::function<Matrix(uint64_t)> rule,
                                  bool norm_le_one = true);

  int dim() const { return dim_; }
  bool norm_bounded() const { return norm_le_one_; }
  const std::string& name() const { return name_; }

  // n >= 1.
  Matrix at(uint64_t n) const;

 private:
  SequenceSource() = default;

  int dim_ = 0;
  bool norm_le_one_ = true;
  std::string name_;
  std::shared_ptr<const std::vector<Matrix>> list_;
  std::function<Matrix(uint64_t)> rule_;
};

}  // namespace lyapgap
