#include "arelab/theory.hpp"

#include <cmath>
#include <sstream>

#include "arelab/errors.hpp"

namespace arelab {

double efficiency_theoretical(const NormalizedScore& score) {
  const double s = sup_norm_A(score);
  return 1.0 / (4.0 * s * s);
}

double efficiency_power_family(double r) {
  if (!(r > 0.0)) throw DomainError("efficiency_power_family needs r > 0");
  if (r >= 0.5) {
    throw DomainError("efficiency is infinite for r >= 1/2: the heavy-tailed alternative makes N_n/n diverge");
  }
  return std::pow(1.0 - r, 2.0 - 2.0 / r) / (4.0 * (1.0 - 2.0 * r));
}

SlopePair slopes(std::size_t n, double theta, const NormalizedScore& score) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("slopes need theta in (0, 1)");
  const double s = sup_norm_A(score);
  const double nt2 = static_cast<double>(n) * theta * theta;
  return {2.0 * nt2 * s * s, nt2 / 2.0, n, theta};
}

double bernstein_bound(double x, double M, std::size_t n) {
  if (!(x >= 0.0)) throw DomainError("bernstein_bound needs x >= 0");
  if (!(M > 0.0)) throw DomainError("bernstein_bound needs M > 0");
  if (n == 0) throw DomainError("bernstein_bound needs n >= 1");
  const double v = 2.0 * std::exp(-x * x / (2.0 * (1.0 + x * M / std::sqrt(static_cast<double>(n)))));
  return std::min(1.0, v);
}

double bernstein_scale(double r, const MomentSet& m) {
  if (!(m.var0 > 0.0)) throw DomainError("bernstein_scale needs a positive null variance");
  return 6.0 * r / m.sigma0();
}

ModerateDeviationRate np_moddev_rate_detail(const LocalAlternative& alt, std::size_t n, double x,
                                            const SimulationConfig& cfg) {
  if (!(x > 0.0)) throw DomainError("np_moddev_rate needs x > 0");
  if (n == 0) throw DomainError("np_moddev_rate needs n >= 1");
  const MomentSet m = log_moments(alt);
  const double sigma0 = m.sigma0();
  const bool heavy = alt.spec().is_power_tail() && alt.spec().tail_exponent() >= 0.5;
  if (!heavy) {
    const double lo = 2.0 * kModerateDeviationDelta * sigma0;
    const double hi = 2.0 * (1.0 - kModerateDeviationDelta) * sigma0;
    if (!(x > lo && x < hi)) {
      std::ostringstream msg;
      msg << "x=" << x << " lies outside the moderate-deviation window (" << lo << ", " << hi << ")";
      throw DomainError(msg.str());
    }
  }
  const double nn = static_cast<double>(n);
  ModerateDeviationRate out;
  out.sigma0 = sigma0;
  out.tail = np_null_tail(alt, m, n, std::sqrt(nn) * x, cfg);
  out.rate = -out.tail.log_probability / (nn * x * x);
  return out;
}

double np_moddev_rate(const LocalAlternative& alt, std::size_t n, double x, const SimulationConfig& cfg) {
  return np_moddev_rate_detail(alt, n, x, cfg).rate;
}

}  // namespace arelab
