#ifndef BACNOMA_SPECFUN_HPP
#define BACNOMA_SPECFUN_HPP

namespace bacnoma::specfun {

// Exponential integral E1(t) = int_t^inf e^-u / u du, t > 0.
// Relative error <= 1e-12 over the double range.
// Throws std::domain_error for t <= 0 or NaN.
double e1(double t);

// e^t * E1(t). Finite for every t > 0; this is the form to use when e^t
// alone would overflow.
double e1_scaled(double t);

// Ei(-t) = -E1(t), always negative for t > 0.
double ei_neg(double t);

// Average-rate kernel f(x) = -e^(1/x) * Ei(-1/x) = e^(1/x) * E1(1/x),
// extended continuously with f(0) = 0. Monotonically increasing on x >= 0.
// Output in nats.
double avg_rate_kernel(double x);

// Closed-form df/dx = e^(1/x)/x^2 * Ei(-1/x) + 1/x, x > 0. Nonnegative.
double avg_rate_kernel_derivative(double x);

}  // namespace bacnoma::specfun

#endif  // BACNOMA_SPECFUN_HPP
