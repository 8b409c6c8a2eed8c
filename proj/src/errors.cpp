#include "gcurve/errors.hpp"

namespace gcurve {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeSource: return "NegativeSource";
    case ErrorKind::AubryWindMismatch: return "AubryWindMismatch";
    case ErrorKind::EmptyAubry: return "EmptyAubry";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InadmissibleTrajectory: return "InadmissibleTrajectory";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::NotStabilized: return "NotStabilized";
    case ErrorKind::InsufficientHorizon: return "InsufficientHorizon";
    case ErrorKind::WindNotZero: return "WindNotZero";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace gcurve
