#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace volseg {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorCode {
  MalformedHeader,
  BadRow,
  EmptySeries,
  SeriesTooShort,
  ConstantSeries,
  AllZeroSeries,
  EmptySample,
  BelowTableRange,
  InsufficientSims,
  InvalidParams,
  InvalidNu,
  LengthMismatch,
  NonPositiveVariance,
  RegimeTooShort,
  InvalidSpec,
  IoError,
};

const char* to_string(ErrorCode code);

// Recoverable failures carry a code so callers can branch without matching
// message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

// Change points splitting a series of length n into regimes. Each entry is
// the 0-based index of the first observation of a new regime, strictly
// increasing and strictly inside (0, n). Empty means a single regime.
struct Segmentation {
  std::vector<Index> change_points;
  Index n = 0;

  Index regime_count() const {
    return static_cast<Index>(change_points.size()) + 1;
  }

  // Half-open [start, end) bounds of regime j.
  std::pair<Index, Index> regime_bounds(Index j) const {
    Index start = (j == 0) ? 0 : change_points[static_cast<std::size_t>(j - 1)];
    Index end = (j + 1 == regime_count())
                    ? n
                    : change_points[static_cast<std::size_t>(j)];
    return {start, end};
  }

  void validate() const;
};

}  // namespace volseg
