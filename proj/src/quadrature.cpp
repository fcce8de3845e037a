#include "arelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "arelab/errors.hpp"

namespace arelab::quad {

namespace bmq = boost::math::quadrature;

Result gauss_kronrod(const Integrand& h, double a, double b, double rel_tol) {
  Result res;
  if (!(b > a)) return res;
  // Boost 1.74 compares the unscaled panel error against a scaled tolerance,
  // so tiny intervals never converge. Mapping onto [-1, 1] keeps the scale at 1.
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto mapped = [&h, mid, half](double x) { return half * h(mid + half * x); };
  double l1 = 0.0;
  res.value = bmq::gauss_kronrod<double, 61>::integrate(mapped, -1.0, 1.0, 15, rel_tol, &res.error, &l1);
  return res;
}

Result tanh_sinh(const Integrand& h, double a, double b, double rel_tol) {
  Result res;
  if (!(b > a)) return res;
  // The integrator is cheap to build but holds its abscissa tables; one per thread.
  thread_local bmq::tanh_sinh<double> integrator(18);
  double l1 = 0.0;
  std::size_t levels = 0;
  try {
    res.value = integrator.integrate(h, a, b, rel_tol, &res.error, &l1, &levels);
  } catch (const std::exception& e) {
    throw NumericError(std::string("tanh-sinh quadrature failed on (") + std::to_string(a) + ", " +
                       std::to_string(b) + "]: " + e.what());
  }
  return res;
}

namespace {

// r with |h(t)| ~ t^-r, read off two points deep inside (0, split]; 0 when h
// does not blow up like a power.
double estimate_tail_exponent(const Integrand& h, double split) {
  const double t1 = split * 1e-10, t2 = split * 1e-5;
  const double h1 = std::fabs(h(t1)), h2 = std::fabs(h(t2));
  if (!(h1 > 0.0 && h2 > 0.0) || !std::isfinite(h1) || !std::isfinite(h2)) return 0.0;
  const double r = std::log(h1 / h2) / std::log(t2 / t1);
  return r > 0.05 ? std::min(r, 0.99) : 0.0;
}

}  // namespace

Result unit_interval(const Integrand& h, double split, std::span<const double> breakpoints,
                     double abs_tol, double rel_tol, double tail_exponent) {
  split = std::clamp(split, 1e-300, 0.5);
  // Geometric panels from split to 1: the integrand varies on the scale of t.
  std::vector<double> cuts{split};
  for (double c = 4.0 * split; c < 1.0; c *= 4.0) cuts.push_back(c);
  for (double c : breakpoints) {
    if (c > split && c < 1.0) cuts.push_back(c);
  }
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  if (tail_exponent < 0.0) tail_exponent = estimate_tail_exponent(h, split);
  Result total;
  if (tail_exponent > 0.0) {
    // t = split s^q turns t^-r dt into s^(q (1 - r) - 1) ds; q is capped so
    // that t does not underflow over a visible part of (0, 1].
    const double q = std::min(1.0 / (1.0 - tail_exponent), 8.0);
    const auto g = [&h, split, q](double s) {
      const double t = split * std::pow(s, q);
      return t > 0.0 ? split * q * std::pow(s, q - 1.0) * h(t) : 0.0;
    };
    total = tanh_sinh(g, 0.0, 1.0, rel_tol);
  } else {
    total = tanh_sinh(h, 0.0, split, rel_tol);
  }
  std::ostringstream panels;
  panels << "(0," << split << "]: err " << total.error;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Result part = gauss_kronrod(h, cuts[i], cuts[i + 1], rel_tol);
    total.value += part.value;
    total.error += part.error;
    panels << "; [" << cuts[i] << "," << cuts[i + 1] << "]: err " << part.error;
  }
  if (!std::isfinite(total.value) || total.error > std::max(abs_tol, rel_tol * std::fabs(total.value))) {
    std::ostringstream msg;
    msg << "quadrature did not converge near t=0: value " << total.value << ", error estimate "
        << total.error << " exceeds tolerance " << std::max(abs_tol, rel_tol * std::fabs(total.value))
        << " (panels " << panels.str() << ")";
    throw NumericError(msg.str());
  }
  return total;
}

}  // namespace arelab::quad
