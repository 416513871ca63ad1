#include "catorder/error.hpp"

namespace catorder {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularHessian: return "SingularHessian";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NotEquivalent: return "NotEquivalent";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::JTooLarge: return "JTooLarge";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace catorder
