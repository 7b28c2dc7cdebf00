#pragma once

namespace hetreg {

// Regularized incomplete gamma functions, series + continued fraction.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Upper tail P(X > x) of the chi-squared distribution with df degrees of
/// freedom. Absolute accuracy better than 1e-10.
double chi_squared_upper_tail(double x, int df);

}  // namespace hetreg
