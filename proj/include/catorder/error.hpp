#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace catorder {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  Infeasible,
  NonFinite,
  SingularHessian,
  NonConvergence,
  NotEquivalent,
  Unsupported,
  JTooLarge,
  Parse,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// A cumulative-logit row whose linear predictors are not strictly increasing.
class InfeasibleError : public Error {
 public:
  InfeasibleError(int row, int category, const std::string& what)
      : Error(ErrorKind::Infeasible, what), row_(row), category_(category) {}

  int row() const noexcept { return row_; }
  int category() const noexcept { return category_; }

 private:
  int row_;
  int category_;
};

}  // namespace catorder
