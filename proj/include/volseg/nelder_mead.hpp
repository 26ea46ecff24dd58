#pragma once

#include "volseg/types.hpp"

#include <functional>

namespace volseg {

struct SimplexOptions {
  double init_step = 0.5;
  double rel_tol = 1e-8;  // relative simplex diameter at convergence
  long max_eval = 50000;
};

struct SimplexResult {
  Vector x;
  double value = 0.0;
  bool converged = false;
  long n_eval = 0;
};

// Derivative-free simplex minimization (reflection/expansion/contraction/
// shrink with the standard coefficients). Non-finite objective values are
// treated as +inf, which lets callers reject invalid regions.
SimplexResult nelder_mead(const std::function<double(const Vector&)>& f,
                          const Vector& start, const SimplexOptions& opts = {});

}  // namespace volseg
