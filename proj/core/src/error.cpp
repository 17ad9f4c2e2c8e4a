#include "daur/error.hpp"

namespace daur {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::RateUndefined: return "rate-undefined";
    case ErrorKind::ModelDegeneracy: return "model-degeneracy";
    case ErrorKind::ContractViolation: return "contract-violation";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::ExtractionDegenerate: return "extraction-degenerate";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace daur
