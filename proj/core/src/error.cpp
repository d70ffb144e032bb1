#include "mre/error.hpp"

namespace mre {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularDesign: return "SingularDesign";
    case ErrorKind::BadReplication: return "BadReplication";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DegenerateBlock: return "DegenerateBlock";
    case ErrorKind::WrongShape: return "WrongShape";
    case ErrorKind::NotEstimable: return "NotEstimable";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::IncompatiblePair: return "IncompatiblePair";
    case ErrorKind::BoundExceeded: return "BoundExceeded";
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace mre
