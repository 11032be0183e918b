#include "que/errors.hpp"

namespace que {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::ResourceLimit: return "resource-limit error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::UnsupportedReference: return "unsupported-reference error";
    case ErrorKind::DegenerateCluster: return "degenerate-cluster error";
    case ErrorKind::IllConditionedWindow: return "ill-conditioned-window error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace que
