#pragma once

#include <functional>
#include <span>

namespace arelab::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
};

using Integrand = std::function<double(double)>;

// Adaptive 61-point Gauss-Kronrod on [a, b].
Result gauss_kronrod(const Integrand& h, double a, double b, double rel_tol);

// Double-exponential (tanh-sinh) rule on (a, b]; tolerates integrable
// singularities at a.
Result tanh_sinh(const Integrand& h, double a, double b, double rel_tol);

// int_0^1 h(t) dt for integrands with an integrable singularity at t = 0:
// tanh-sinh on (0, split], Gauss-Kronrod on geometric panels of [split, 1]
// also cut at the interior breakpoints. A t^-r blow-up is flattened by a power
// substitution on the first panel; tail_exponent < 0 estimates r from h, 0
// disables the substitution. Throws NumericError
// when the combined error estimate exceeds max(abs_tol, rel_tol * |value|).
Result unit_interval(const Integrand& h, double split, std::span<const double> breakpoints,
                     double abs_tol, double rel_tol = 1e-12, double tail_exponent = -1.0);

}  // namespace arelab::quad
