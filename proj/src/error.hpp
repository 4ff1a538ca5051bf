#pragma once

#include <stdexcept>
#include <string>

namespace lyapgap {

enum class ErrorKind {
  InvalidArgument,   // malformed input (dims, ranges, NaN entries)
  Precondition,      // a documented operation precondition was violated
  Domain,            // input outside the mathematical domain (zero vector, ...)
  Singular,          // a factor that must be invertible is numerically singular
  DegenerateSum,     // subspaces fail to form a direct sum
  Accumulation,      // product accumulator overflowed or lost its invariant
  Io,                // file read/write failure
  Parse,             // config or data file syntax error
  Internal           // invariant breach inside the library (a bug)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace lyapgap
