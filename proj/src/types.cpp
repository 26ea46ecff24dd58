#include "volseg/types.hpp"

namespace volseg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::BadRow: return "BadRow";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::AllZeroSeries: return "AllZeroSeries";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::BelowTableRange: return "BelowTableRange";
    case ErrorCode::InsufficientSims: return "InsufficientSims";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidNu: return "InvalidNu";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::RegimeTooShort: return "RegimeTooShort";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

void Segmentation::validate() const {
  Index prev = 0;
  for (Index cp : change_points) {
    if (cp <= prev || cp >= n) {
      raise(ErrorCode::InvalidParams,
            "change point " + std::to_string(cp) +
                " outside (0, " + std::to_string(n) + ") or not increasing");
    }
    prev = cp;
  }
}

}  // namespace volseg
