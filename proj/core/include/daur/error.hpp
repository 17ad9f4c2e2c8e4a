#pragma once

#include <stdexcept>
#include <string>

namespace daur {

enum class ErrorKind {
  InvalidParameter,
  RateUndefined,
  ModelDegeneracy,
  ContractViolation,
  Infeasible,
  DimensionMismatch,
  ExtractionDegenerate,
  Usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace daur
