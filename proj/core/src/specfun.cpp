#include "bacnoma/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bacnoma::specfun {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Series expansion, for t <= 1:
//
//                             inf
//                            -----      n+1  n
//                             \     (-1)    t
//   E (t) = -gamma - ln(t) +   )    ---------
//    1                        /       n * n!
//                            -----
//                            n = 1
//
// Alternating with rapidly shrinking terms on (0, 1]; converges to machine
// precision in under 30 terms.
double e1_series(double t) {
  double sum = 0.0;
  double pow_term = 1.0;  // (-t)^n / n!
  for (int n = 1; n <= 60; ++n) {
    pow_term *= -t / n;
    const double term = -pow_term / n;
    sum += term;
    if (std::fabs(term) < 1e-17 * (std::fabs(sum) + 1e-300)) {
      break;
    }
  }
  return -kEulerGamma - std::log(t) + sum;
}

// Continued fraction (modified Lentz), for t > 1:
//
//                 -t
//                e       1   1   2   2   3
//   E (t)  =    ----- ( --- --- --- --- --- ... )
//    1           1      t + 1+  t+  1+  t+
//
// evaluated in the even form with partial numerators -k^2. Returns the
// scaled value e^t * E1(t).
double e1_cf_scaled(double t) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  double b = t + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k <= 300; ++k) {
    const double a = -static_cast<double>(k) * static_cast<double>(k);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double delta = c * d;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) {
      break;
    }
  }
  return h;
}

void require_positive(double t, const char* who) {
  if (std::isnan(t) || t <= 0.0) {
    throw std::domain_error(std::string(who) +
                            ": argument must be positive, got " +
                            std::to_string(t));
  }
}

}  // namespace

double e1_scaled(double t) {
  require_positive(t, "e1_scaled");
  if (t <= 1.0) {
    return std::exp(t) * e1_series(t);
  }
  return e1_cf_scaled(t);
}

double e1(double t) {
  require_positive(t, "e1");
  if (t <= 1.0) {
    return e1_series(t);
  }
  // exp(-t) underflows gracefully to 0 for t beyond ~745.
  return e1_cf_scaled(t) * std::exp(-t);
}

double ei_neg(double t) {
  require_positive(t, "ei_neg");
  return -e1(t);
}

double avg_rate_kernel(double x) {
  if (std::isnan(x) || x < 0.0) {
    throw std::domain_error("avg_rate_kernel: argument must be nonnegative, got " +
                            std::to_string(x));
  }
  if (x == 0.0) {
    return 0.0;  // limit of -e^(1/x) Ei(-1/x) as x -> 0+
  }
  return e1_scaled(1.0 / x);
}

double avg_rate_kernel_derivative(double x) {
  require_positive(x, "avg_rate_kernel_derivative");
  // e^(1/x)/x^2 * Ei(-1/x) + 1/x  ==  (1 - f(x)/x) / x
  const double f = avg_rate_kernel(x);
  return (1.0 - f / x) / x;
}

}  // namespace bacnoma::specfun
