#include "arelab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "arelab/errors.hpp"
#include "arelab/quadrature.hpp"

namespace arelab {

namespace {

// Panel rule shared by every integral here, so that identical integrands give
// bit-identical values (I_01 and e0, for instance).
constexpr double kPanelRelTol = 1e-12;

double singular_split(const LocalAlternative& alt) {
  if (!alt.spec().is_power_tail()) return 1e-3;
  const double r = alt.spec().tail_exponent();
  return std::clamp(std::pow(alt.theta(), 1.0 / r), 1e-300, 1e-3);
}

// Point where log p(t) = level for the power tail (p is decreasing in t).
std::vector<double> level_crossing(const LocalAlternative& alt, double level) {
  if (!alt.spec().is_power_tail()) return {};
  const double r = alt.spec().tail_exponent();
  const double f = 1.0 + std::expm1(level) / alt.theta();
  if (!(f > 0.0)) return {};
  const double t = std::pow(f / (1.0 - r), -1.0 / r);
  if (t > 0.0 && t < 1.0) return {t};
  return {};
}

quad::Result integrate(const quad::Integrand& h, const LocalAlternative& alt,
                       std::span<const double> breakpoints, double tol, const char* what) {
  try {
    const double r = alt.spec().is_power_tail() ? alt.spec().tail_exponent() : -1.0;
    return quad::unit_interval(h, singular_split(alt), breakpoints, tol, kPanelRelTol, r);
  } catch (const NumericError& e) {
    std::ostringstream msg;
    msg << what << " for " << alt.spec().name() << ", theta=" << alt.theta() << ": " << e.what();
    throw NumericError(msg.str());
  }
}

double ipow(double x, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

}  // namespace

double MomentSet::sigma0() const noexcept { return std::sqrt(var0); }
double MomentSet::sigma1() const noexcept { return std::sqrt(var1); }

MomentSet log_moments(const LocalAlternative& alt, double tol) {
  const auto logp = [&alt](double t) { return log_density(alt, t); };
  MomentSet m;
  m.theta = alt.theta();

  const quad::Result e0 = integrate(logp, alt, {}, tol, "e0 quadrature");
  m.e0 = e0.value;
  const quad::Result var0 = integrate(
      [&](double t) {
        const double d = logp(t) - m.e0;
        return d * d;
      },
      alt, {}, tol, "null variance quadrature");
  m.var0 = var0.value;

  const quad::Result e1 = integrate([&](double t) { return density_value(alt, t) * logp(t); }, alt, {},
                                    tol, "alternative mean quadrature");
  m.e1 = e1.value;
  const quad::Result var1 = integrate(
      [&](double t) {
        const double d = logp(t) - m.e1;
        return density_value(alt, t) * d * d;
      },
      alt, {}, tol, "alternative variance quadrature");
  m.var1 = var1.value;

  m.quadrature_error_estimate = e0.error + var0.error + e1.error + var1.error;
  if (m.quadrature_error_estimate > tol) {
    std::ostringstream msg;
    msg << "combined moment error " << m.quadrature_error_estimate << " exceeds tol " << tol;
    throw NumericError(msg.str());
  }
  return m;
}

double shift_b(const MomentSet& m, std::size_t n) {
  if (!(m.var0 > 0.0)) throw DomainError("shift b_n is undefined for a degenerate null variance");
  if (n == 0) throw DomainError("shift b_n needs n >= 1");
  return std::sqrt(static_cast<double>(n)) * (m.e1 - m.e0) / m.sigma0();
}

double integral_I(int k, int m, const LocalAlternative& alt, double tol) {
  if (k < 0 || k > 1 || m < 1) throw DomainError("integral_I needs k in {0, 1} and m >= 1");
  const double theta = alt.theta();
  const auto h = [&](double t) {
    const double lp = log_density(alt, t);
    const double w = k == 0 ? 1.0 : theta * (alt.spec().density(t) - 1.0);
    return w * ipow(lp, m);
  };
  return integrate(h, alt, {}, tol, "I integral").value;
}

double integral_J(int k, int m, const LocalAlternative& alt, double e0, double tol) {
  if (k < 0 || k > 1 || m < 1) throw DomainError("integral_J needs k in {0, 1} and m >= 1");
  const auto h = [&](double t) {
    const double d = std::fabs(log_density(alt, t) - e0);
    const double w = k == 0 ? 1.0 : density_value(alt, t);
    return w * ipow(d, m);
  };
  const std::vector<double> kink = (m % 2 == 1) ? level_crossing(alt, e0) : std::vector<double>{};
  return integrate(h, alt, kink, tol, "J integral").value;
}

}  // namespace arelab
