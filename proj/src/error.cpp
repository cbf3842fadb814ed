#include "wavefront/error.hpp"

namespace wavefront {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OutOfStrip: return "OutOfStrip";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::EmptyStrip: return "EmptyStrip";
    case ErrorCode::InvalidKernel: return "InvalidKernel";
    case ErrorCode::NoRoots: return "NoRoots";
    case ErrorCode::StripTooNarrow: return "StripTooNarrow";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::ZeroSpeed: return "ZeroSpeed";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::NoWave: return "NoWave";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::NegativeValues: return "NegativeValues";
    case ErrorCode::TailUnresolved: return "TailUnresolved";
    case ErrorCode::NonPositiveTail: return "NonPositiveTail";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace wavefront
