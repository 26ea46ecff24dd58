#pragma once

namespace volseg {

// Regularized lower and upper incomplete gamma functions P(a, x) and
// Q(a, x) = 1 - P(a, x), a > 0, x >= 0. Series expansion below the
// transition point x = a + 1, Lentz continued fraction above it.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper-tail probability of a chi-square variate with `dof` degrees of
// freedom: P(X > x).
double chi_square_upper_tail(double x, double dof);

}  // namespace volseg
