#include "arelab/alt_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "arelab/errors.hpp"
#include "arelab/kernels.hpp"
#include "arelab/quadrature.hpp"

namespace arelab {

namespace {

void require_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw DomainError("mixing weight theta must lie in [0, 1], got " + std::to_string(theta));
  }
}

void require_open_t(double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw DomainError("t must lie in (0, 1], got " + std::to_string(t));
  }
}

}  // namespace

// Custom density with a CDF either supplied or tabulated at fixed knots.
struct DensitySpec::Custom {
  Function density;
  Function cdf;
  std::string name;
  std::vector<double> knots;  // empty when cdf is supplied
  std::vector<double> cum;    // integral of the density up to each knot

  double integrate_panel(std::size_t k, double t) const {
    if (t <= knots[k]) return 0.0;
    if (k == 0) return quad::tanh_sinh(density, 0.0, t, 1e-12).value;
    return quad::gauss_kronrod(density, knots[k], t, 1e-12).value;
  }

  double tabulated_cdf(double t) const {
    const auto it = std::upper_bound(knots.begin(), knots.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - knots.begin()) - 1;
    return std::clamp(cum[k] + integrate_panel(k, t), 0.0, 1.0);
  }
};

DensitySpec DensitySpec::power_tail(double r) {
  if (!(r > 0.0 && r < 1.0)) {
    throw DomainError("power-tail exponent r must lie in (0, 1), got " + std::to_string(r));
  }
  DensitySpec spec;
  spec.r_ = r;
  return spec;
}

DensitySpec DensitySpec::custom(Function density, Function cdf, std::string name) {
  if (!density) throw DomainError("custom density needs an evaluator");
  auto c = std::make_shared<Custom>();
  c->density = std::move(density);
  c->name = std::move(name);

  std::vector<double> knots{0.0};
  for (int e = -12; e <= -2; ++e) knots.push_back(std::pow(10.0, e));
  for (int i = 2; i <= 100; ++i) knots.push_back(i / 100.0);
  c->knots = knots;
  c->cum.assign(knots.size(), 0.0);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double part = c->integrate_panel(k, knots[k + 1]);
    if (!std::isfinite(part) || part < -1e-12) {
      throw DomainError("custom density '" + c->name + "' is not a nonnegative integrable function");
    }
    c->cum[k + 1] = c->cum[k] + part;
  }
  const double total = c->cum.back();
  if (std::fabs(total - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "custom density '" << c->name << "' integrates to " << total << ", not 1";
    throw DomainError(msg.str());
  }
  if (cdf) {
    c->cdf = std::move(cdf);
    c->knots.clear();
    c->cum.clear();
  }
  DensitySpec spec;
  spec.custom_ = std::move(c);
  return spec;
}

double DensitySpec::tail_exponent() const {
  if (!is_power_tail()) throw DomainError("custom density has no tail exponent");
  return r_;
}

std::string DensitySpec::name() const {
  if (!is_power_tail()) return custom_->name;
  std::ostringstream os;
  os << "power_tail(" << r_ << ")";
  return os.str();
}

double DensitySpec::density(double t) const {
  if (is_power_tail()) return (1.0 - r_) * std::pow(t, -r_);
  const double v = custom_->density(t);
  if (!(v >= 0.0)) {
    throw DomainError("custom density '" + custom_->name + "' is negative or NaN at t=" +
                      std::to_string(t));
  }
  return v;
}

double DensitySpec::cdf(double t) const {
  if (!(t > 0.0)) return 0.0;
  if (t >= 1.0) return 1.0;
  if (is_power_tail()) return std::pow(t, 1.0 - r_);
  if (custom_->cdf) return std::clamp(custom_->cdf(t), 0.0, 1.0);
  return custom_->tabulated_cdf(t);
}

LocalAlternative::LocalAlternative(DensitySpec spec, double theta) : spec_(std::move(spec)), theta_(theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("local alternative needs theta strictly inside (0, 1), got " +
                      std::to_string(theta));
  }
}

LocalAlternative LocalAlternative::from_normalized(const DensitySpec& spec, double theta_normalized) {
  const NormalizedScore score = normalize_score(spec);
  return LocalAlternative(spec, theta_normalized / score.c());
}

double density_value(const DensitySpec& spec, double theta, double t) {
  require_theta(theta);
  require_open_t(t);
  if (theta == 0.0) return 1.0;
  return (1.0 - theta) + theta * spec.density(t);
}

double density_value(const LocalAlternative& alt, double t) {
  return density_value(alt.spec(), alt.theta(), t);
}

double log_density(const DensitySpec& spec, double theta, double t) {
  require_theta(theta);
  require_open_t(t);
  if (theta == 0.0) return 0.0;
  const double f = spec.density(t);
  const double y = theta * (f - 1.0);
  if (std::fabs(y) <= 0.5) return std::log1p(y);
  const double p = (1.0 - theta) + theta * f;
  if (!(p > 0.0)) throw DomainError("density vanishes at t=" + std::to_string(t));
  return std::log(p);
}

double log_density(const LocalAlternative& alt, double t) {
  return log_density(alt.spec(), alt.theta(), t);
}

double cdf_value(const DensitySpec& spec, double theta, double t) {
  require_theta(theta);
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("t must lie in [0, 1], got " + std::to_string(t));
  if (theta == 0.0) return t;
  return (1.0 - theta) * t + theta * spec.cdf(t);
}

double cdf_value(const LocalAlternative& alt, double t) { return cdf_value(alt.spec(), alt.theta(), t); }

double quantile(const DensitySpec& spec, double theta, double u) {
  require_theta(theta);
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("u must lie in [0, 1], got " + std::to_string(u));
  if (u == 0.0 || u == 1.0 || theta == 0.0) return u;
  if (spec.is_power_tail()) {
    double t = u;
    kernels::power_tail_quantile(std::span<double>(&t, 1), {theta, spec.tail_exponent()});
    return t;
  }
  // Halve down to a positive lower end (the CDF can be steep at 0), then bisect
  // to a bracket of relative width 1e-13 and take one Newton step kept inside it.
  double hi = 1.0;
  double lo = 0.5;
  int it = 0;
  while (lo > 0.0 && cdf_value(spec, theta, lo) >= u) {
    hi = lo;
    lo *= 0.5;
    ++it;
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (cdf_value(spec, theta, mid) < u ? lo : hi) = mid;
    if (++it > 1300) {
      std::ostringstream msg;
      msg << "quantile bisection stalled at u=" << u << " with bracket [" << lo << ", " << hi << "]";
      throw NumericError(msg.str());
    }
  }
  double t = 0.5 * (lo + hi);
  if (t > 0.0) {
    const double slope = density_value(spec, theta, t);
    if (slope > 0.0 && std::isfinite(slope)) {
      const double next = t - (cdf_value(spec, theta, t) - u) / slope;
      if (next >= lo && next <= hi) t = next;
    }
  }
  return t;
}

double quantile(const LocalAlternative& alt, double u) { return quantile(alt.spec(), alt.theta(), u); }

std::vector<double> sample_alternative(const DensitySpec& spec, double theta, std::size_t n,
                                       const rng::Stream& stream) {
  require_theta(theta);
  std::vector<double> x(n);
  stream.fill_uniforms(x);
  if (theta == 0.0) return x;
  if (spec.is_power_tail()) {
    kernels::power_tail_quantile(x, {theta, spec.tail_exponent()});
  } else {
    for (double& v : x) v = quantile(spec, theta, v);
  }
  return x;
}

std::vector<double> sample_alternative(const LocalAlternative& alt, std::size_t n,
                                       const rng::Stream& stream) {
  return sample_alternative(alt.spec(), alt.theta(), n, stream);
}

double NormalizedScore::a(double t) const {
  require_open_t(t);
  return (spec_.density(t) - 1.0) / c_;
}

double NormalizedScore::primitive(double t) const { return primitive_A(spec_, t) / c_; }

NormalizedScore normalize_score(const DensitySpec& spec) {
  if (spec.is_power_tail()) {
    const double r = spec.tail_exponent();
    if (r >= 0.5) {
      throw DomainError("f is not square integrable for r=" + std::to_string(r) +
                        " (r >= 1/2); use the heavy-tail pathway");
    }
    return NormalizedScore(spec, r / std::sqrt(1.0 - 2.0 * r));
  }
  const quad::Integrand sq = [&spec](double t) {
    const double g = spec.density(t) - 1.0;
    return g * g;
  };
  double c2 = 0.0;
  try {
    c2 = quad::unit_interval(sq, 1e-6, {}, 1e-10, 1e-10).value;
  } catch (const NumericError& e) {
    throw DomainError("f does not appear square integrable: " + std::string(e.what()));
  }
  if (!(c2 > 0.0) || !std::isfinite(c2)) {
    throw DomainError("f - 1 has zero or infinite L2 norm; no normalized score exists");
  }
  return NormalizedScore(spec, std::sqrt(c2));
}

double primitive_A(const DensitySpec& spec, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("t must lie in [0, 1], got " + std::to_string(t));
  if (t == 0.0 || t == 1.0) return 0.0;
  if (spec.is_power_tail()) return std::pow(t, 1.0 - spec.tail_exponent()) - t;
  return spec.cdf(t) - t;
}

double primitive_A(const NormalizedScore& score, double t) { return score.primitive(t); }

SupNorm sup_norm_A_detail(const NormalizedScore& score) {
  const DensitySpec& spec = score.spec();
  if (spec.is_power_tail()) {
    const double r = spec.tail_exponent();
    return {std::sqrt(1.0 - 2.0 * r) * std::pow(1.0 - r, 1.0 / r - 1.0), std::pow(1.0 - r, 1.0 / r)};
  }
  constexpr std::size_t kGrid = 4096;
  const auto abs_a = [&score](double t) { return std::fabs(score.primitive(t)); };
  std::vector<std::pair<double, std::size_t>> values;
  values.reserve(kGrid - 1);
  for (std::size_t i = 1; i < kGrid; ++i) {
    values.emplace_back(abs_a(static_cast<double>(i) / kGrid), i);
  }
  std::partial_sort(values.begin(), values.begin() + 3, values.end(),
                    [](const auto& x, const auto& y) { return x.first > y.first; });
  SupNorm best{values.front().first, static_cast<double>(values.front().second) / kGrid};
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t j = 0; j < 3; ++j) {
    double lo = static_cast<double>(values[j].second - 1) / kGrid;
    double hi = static_cast<double>(values[j].second + 1) / kGrid;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = abs_a(x1);
    double f2 = abs_a(x2);
    while (hi - lo > 1e-8) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = abs_a(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = abs_a(x1);
      }
    }
    const double t = 0.5 * (lo + hi);
    const double v = abs_a(t);
    if (v > best.value) best = {v, t};
  }
  return best;
}

double sup_norm_A(const NormalizedScore& score) { return sup_norm_A_detail(score).value; }

double kappa(double r, double theta) {
  if (!(r >= 0.5 && r < 1.0)) {
    throw DomainError("kappa needs r in [1/2, 1), got " + std::to_string(r));
  }
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw DomainError("kappa needs theta in (0, 1], got " + std::to_string(theta));
  }
  if (r == 0.5) return theta * std::sqrt(std::log(1.0 / theta));
  return std::pow(theta, 1.0 / (2.0 * r));
}

HeavyTailCertificate check_heavy_tail(const DensitySpec& spec, double r, const HeavyTailOptions& options) {
  if (!(r >= 0.5 && r < 1.0)) {
    throw DomainError("heavy-tail condition needs r in [1/2, 1), got " + std::to_string(r) +
                      "; square-integrable densities use normalize_score");
  }
  if (options.grid_points < 16 || !(options.grid_min > 0.0 && options.grid_min < 1e-2)) {
    throw DomainError("heavy-tail grid needs at least 16 points and grid_min in (0, 0.01)");
  }
  const std::size_t m = options.grid_points;
  const double log_min = std::log(options.grid_min);
  std::vector<double> t(m), g(m), f(m);
  for (std::size_t i = 0; i < m; ++i) {
    // Log-spaced on [grid_min, 1); the right end stops one step short of 1.
    t[i] = std::exp(log_min * (1.0 - static_cast<double>(i) / m));
    f[i] = spec.density(t[i]);
    g[i] = f[i] * std::pow(t[i], r);
    if (!std::isfinite(g[i])) {
      throw ConditionViolated("density is not finite at t=" + std::to_string(t[i]), t[i]);
    }
  }

  // A bounded ratio f(t) t^r near 0 has no drift in log-log coordinates.
  const double log_cut = log_min + options.trend_decades * std::log(10.0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < m && std::log(t[i]) <= log_cut; ++i) {
    if (!(g[i] > 0.0)) {
      throw ConditionViolated("f(t) t^r vanishes at t=" + std::to_string(t[i]), t[i]);
    }
    const double x = std::log(t[i]);
    const double y = std::log(g[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  if (std::fabs(slope) > options.trend_tolerance) {
    // The ratio escapes towards 0 or infinity; the extreme sits at the left end.
    worst = 0;
    std::ostringstream msg;
    msg << "no constants C1, C2 exist for r=" << r << ": f(t) t^r drifts with log-log slope " << slope
        << " near 0 (worst grid point t=" << t[worst] << ", f(t) t^r=" << g[worst] << ")";
    throw ConditionViolated(msg.str(), t[worst]);
  }

  const double c1_max = std::pow(1.0 - r, r);
  const double edge0 = std::pow(c1_max, 1.0 / r);
  double c1 = c1_max;
  for (std::size_t i = 0; i < m && t[i] < edge0; ++i) {
    if (g[i] < c1) {
      c1 = g[i];
      worst = i;
    }
  }
  if (!(c1 > 0.0)) {
    throw ConditionViolated("lower bound fails: f(t) t^r reaches 0 at t=" + std::to_string(t[worst]),
                            t[worst]);
  }
  const double edge = std::pow(c1, 1.0 / r);
  double envelope = 0.0;
  for (std::size_t i = 0; i < m; ++i) envelope = std::max(envelope, t[i] < edge ? g[i] : f[i]);
  HeavyTailCertificate cert;
  cert.r = r;
  cert.c1 = c1;
  cert.c2 = options.margin * std::max(1.0, envelope);
  cert.grid_points_checked = m;
  cert.grid_min = options.grid_min;
  return cert;
}

}  // namespace arelab
