#include "gshs/error.hpp"

namespace gshs {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::DomainViolation: return "domain-violation";
    case ErrorKind::PreconditionViolation: return "precondition-violation";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::SamplerStuck: return "sampler-stuck";
    case ErrorKind::PathBlowup: return "path-blowup";
    case ErrorKind::ConfigError: return "config-error";
  }
  return "error";
}

}  // namespace gshs
