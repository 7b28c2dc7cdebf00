#include "hetreg/special.hpp"

#include <cmath>
#include <string>

#include "hetreg/error.hpp"

namespace hetreg {

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 10000;
constexpr double kTiny = 1e-300;

// Lower regularized gamma by power series; converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  fail(ErrorCode::InternalConsistency, "incomplete gamma series did not converge");
}

// Upper regularized gamma by modified Lentz continued fraction; for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  fail(ErrorCode::InternalConsistency,
       "incomplete gamma continued fraction did not converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    fail(ErrorCode::InvalidArgument,
         "regularized gamma needs a > 0 and x >= 0");
  }
  if (x == 0.0) {
    return 0.0;
  }
  if (x < a + 1.0) {
    return gamma_p_series(a, x);
  }
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    fail(ErrorCode::InvalidArgument,
         "regularized gamma needs a > 0 and x >= 0");
  }
  if (x == 0.0) {
    return 1.0;
  }
  if (x < a + 1.0) {
    return 1.0 - gamma_p_series(a, x);
  }
  return gamma_q_continued_fraction(a, x);
}

double chi_squared_upper_tail(double x, int df) {
  if (df < 1) {
    fail(ErrorCode::InvalidArgument, "chi-squared needs df >= 1, got " +
                                         std::to_string(df));
  }
  if (!(x >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "chi-squared tail needs x >= 0");
  }
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace hetreg
