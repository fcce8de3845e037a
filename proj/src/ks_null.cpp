#include "arelab/ks_null.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "arelab/errors.hpp"
#include "arelab/kernels.hpp"
#include "arelab/parallel.hpp"
#include "arelab/rng.hpp"
#include "sorting.hpp"

namespace arelab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Below this asymptotic survival the exact path switches to the log-space tail sum.
constexpr double kTailSwitch = 1e-7;

void rescale(Eigen::MatrixXd& q, long& exponent) {
  const double mx = q.cwiseAbs().maxCoeff();
  if (!(mx > 0.0) || !std::isfinite(mx)) return;
  int e = 0;
  std::frexp(mx, &e);
  q *= std::ldexp(1.0, -e);
  exponent += e;
}

// H^n with the scale of the result carried separately as a power of two.
Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& h, std::size_t n, long& exponent) {
  if (n == 1) {
    exponent = 0;
    return h;
  }
  long half_exp = 0;
  const Eigen::MatrixXd half = matrix_power(h, n / 2, half_exp);
  Eigen::MatrixXd q = half * half;
  exponent = 2 * half_exp;
  if (n % 2 == 1) q = (h * q).eval();
  rescale(q, exponent);
  return q;
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void require_n_u(std::size_t n, double u) {
  if (n == 0) throw DomainError("KS distribution needs n >= 1");
  if (!(u > 0.0)) throw DomainError("KS survival needs u > 0");
}

KsTail exact_tail(std::size_t n, double u) {
  KsTail tail;
  tail.n = n;
  tail.u = u;
  tail.method = KsMethod::exact;
  const double nn = static_cast<double>(n);
  const double d = u / std::sqrt(nn);
  if (d <= 0.5 / nn) {
    tail.survival = 1.0;
    tail.log_survival = 0.0;
    return tail;
  }
  if (d >= 1.0) {
    tail.survival = 0.0;
    tail.log_survival = kNegInf;
    return tail;
  }
  if (ks_sf_asymptotic(u) < kTailSwitch) {
    tail.log_survival = ks_log_sf_tail(n, d);
    tail.survival = std::exp(tail.log_survival);
    return tail;
  }
  tail.survival = std::clamp(1.0 - ks_cdf_exact(n, d), 0.0, 1.0);
  tail.log_survival = tail.survival > 0.0 ? std::log(tail.survival) : kNegInf;
  return tail;
}

KsTail monte_carlo_tail(std::size_t n, double u, const KsMonteCarloOptions& mc) {
  if (mc.replicates == 0) throw DomainError("Monte Carlo KS needs replicates >= 1");
  constexpr std::size_t kGrain = 256;
  const std::size_t chunks = (mc.replicates + kGrain - 1) / kGrain;
  std::vector<std::size_t> hits(chunks, 0);
  const double threshold = u / std::sqrt(static_cast<double>(n));
  parallel_for(mc.replicates, kGrain, resolve_threads(mc.threads), [&](std::size_t begin, std::size_t end) {
    thread_local std::vector<double> x, scratch;
    thread_local std::vector<std::uint32_t> offsets;
    x.resize(n);
    std::size_t count = 0;
    for (std::size_t rep = begin; rep < end; ++rep) {
      rng::Stream(mc.seed, rng::Op::ks_null, 0, rep).fill_uniforms(x);
      detail::sort_unit_interval(x, scratch, offsets);
      if (kernels::ks_max_gap(x) >= threshold) ++count;
    }
    hits[begin / kGrain] = count;
  });
  std::size_t total = 0;
  for (std::size_t h : hits) total += h;
  KsTail tail;
  tail.n = n;
  tail.u = u;
  tail.method = KsMethod::monte_carlo;
  tail.replicates = mc.replicates;
  tail.survival = static_cast<double>(total) / static_cast<double>(mc.replicates);
  tail.log_survival = tail.survival > 0.0 ? std::log(tail.survival) : kNegInf;
  tail.standard_error = std::sqrt(tail.survival * (1.0 - tail.survival) / mc.replicates);
  return tail;
}

}  // namespace

KsTail ks_sf(std::size_t n, double u, KsMethod method, const KsMonteCarloOptions& mc) {
  require_n_u(n, u);
  switch (method) {
    case KsMethod::exact:
      return exact_tail(n, u);
    case KsMethod::monte_carlo:
      return monte_carlo_tail(n, u, mc);
    case KsMethod::asymptotic:
      break;
  }
  KsTail tail;
  tail.n = n;
  tail.asymptotic = true;
  tail.u = u;
  tail.method = KsMethod::asymptotic;
  tail.survival = ks_sf_asymptotic(u);
  tail.log_survival = ks_log_sf_asymptotic(u);
  return tail;
}

double ks_sf_asymptotic(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.0) {
    // Jacobi dual form of the CDF converges fast for small lambda.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double term = std::exp(-(2.0 * k - 1) * (2.0 * k - 1) * c);
      cdf += term;
      if (term < 1e-17 * cdf) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16 * sum || term == 0.0) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_log_sf_asymptotic(double lambda) {
  if (lambda < 1.0) return std::log(ks_sf_asymptotic(lambda));
  const double l2 = lambda * lambda;
  double corr = 0.0;
  for (int k = 2; k < 100; ++k) {
    const double term = std::exp(-2.0 * (k * k - 1) * l2);
    corr += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::numbers::ln2 - 2.0 * l2 + std::log1p(corr);
}

double ks_cdf_exact(std::size_t n, double d) {
  if (n == 0) throw DomainError("KS distribution needs n >= 1");
  const double nn = static_cast<double>(n);
  if (d <= 0.5 / nn) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = nn * d;
  const auto k = static_cast<std::size_t>(nd) + 1;
  const std::size_t m = 2 * k - 1;
  if (m > kMaxExactBand) {
    std::ostringstream msg;
    msg << "exact KS distribution at n=" << n << ", d=" << d << " needs a " << m << "x" << m
        << " matrix (limit " << kMaxExactBand << "); use the monte_carlo method";
    throw CapabilityError(msg.str());
  }
  const double h = static_cast<double>(k) - nd;
  const auto mi = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd H(mi, mi);
  for (Eigen::Index i = 0; i < mi; ++i) {
    for (Eigen::Index j = 0; j < mi; ++j) H(i, j) = (i - j + 1 < 0) ? 0.0 : 1.0;
  }
  for (Eigen::Index i = 0; i < mi; ++i) {
    H(i, 0) -= std::pow(h, static_cast<double>(i + 1));
    H(mi - 1, i) -= std::pow(h, static_cast<double>(mi - i));
  }
  if (2.0 * h - 1.0 > 0.0) H(mi - 1, 0) += std::pow(2.0 * h - 1.0, static_cast<double>(m));
  for (Eigen::Index i = 0; i < mi; ++i) {
    for (Eigen::Index j = 0; j < mi; ++j) {
      const Eigen::Index span = i - j + 1;
      double fact = 1.0;
      for (Eigen::Index g = 2; g <= span; ++g) fact *= static_cast<double>(g);
      if (span > 0) H(i, j) /= fact;
    }
  }
  long exponent = 0;
  const Eigen::MatrixXd Q = matrix_power(H, n, exponent);
  const auto c = static_cast<Eigen::Index>(k - 1);
  double s = Q(c, c);
  // Multiply by n! / n^n while keeping s in range.
  for (std::size_t i = 1; i <= n; ++i) {
    s = s * static_cast<double>(i) / nn;
    if (s < 0x1.0p-400) {
      s = std::ldexp(s, 400);
      exponent -= 400;
    }
  }
  return std::clamp(std::ldexp(s, static_cast<int>(std::clamp<long>(exponent, -100000, 100000))), 0.0, 1.0);
}

double ks_log_sf_tail(std::size_t n, double d) {
  if (n == 0) throw DomainError("KS distribution needs n >= 1");
  const double nn = static_cast<double>(n);
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return kNegInf;
  // P(D+ >= d) = d sum_j C(n, j) (1 - d - j/n)^(n - j) (d + j/n)^(j - 1)
  const double lg_n1 = std::lgamma(nn + 1.0);
  double acc = kNegInf;
  const auto jmax = static_cast<std::size_t>(std::floor(nn * (1.0 - d)));
  for (std::size_t j = 0; j <= jmax && j <= n; ++j) {
    const double jd = static_cast<double>(j);
    const double a = 1.0 - d - jd / nn;
    if (!(a > 0.0)) continue;
    const double term = lg_n1 - std::lgamma(jd + 1.0) - std::lgamma(nn - jd + 1.0) +
                        (nn - jd) * std::log(a) + (jd - 1.0) * std::log(d + jd / nn);
    acc = log_add(acc, term);
  }
  const double one_sided = std::log(d) + acc;
  return std::min(0.0, std::numbers::ln2 + one_sided);
}

double ks_critical_asymptotic(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const auto f = [alpha](double l) { return ks_sf_asymptotic(l) - alpha; };
  boost::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, 0.2, 40.0, [](double x, double y) { return std::fabs(y - x) <= 1e-14 * y; }, iters);
  return 0.5 * (a + b);
}

double ks_critical(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("KS critical value needs n >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("KS critical value needs alpha in (0, 1], got " + std::to_string(alpha));
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  if (alpha == 1.0) return 0.5 / root_n;

  static std::mutex cache_mutex;
  static std::map<std::pair<std::size_t, double>, double> cache;
  {
    std::lock_guard lock(cache_mutex);
    const auto it = cache.find({n, alpha});
    if (it != cache.end()) return it->second;
  }

  const auto f = [n, alpha](double u) { return exact_tail(n, u).survival - alpha; };
  const double lo_edge = 0.5 / root_n;
  const double hi_edge = root_n;
  // Bracket around the asymptotic inverse, widening towards the support edges.
  double guess = std::clamp(ks_critical_asymptotic(std::min(alpha, 0.999)), lo_edge, hi_edge);
  double lo = guess, hi = guess;
  double step = 0.02;
  while (lo > lo_edge && f(lo) <= 0.0) {
    lo = std::max(lo_edge, lo - step);
    step *= 2.0;
  }
  step = 0.02;
  while (hi < hi_edge && f(hi) > 0.0) {
    hi = std::min(hi_edge, hi + step);
    step *= 2.0;
  }
  if (lo >= hi) return hi;
  boost::uintmax_t iters = 300;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, [](double x, double y) { return std::fabs(y - x) <= 5e-10; }, iters);
  // b sits on the side where the survival is already <= alpha.
  const double u = f(b) <= 0.0 ? b : (f(a) <= 0.0 ? a : b);
  std::lock_guard lock(cache_mutex);
  cache[{n, alpha}] = u;
  return u;
}

double moddev_rate_ks(std::size_t n, double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("moddev_rate_ks needs 0 < x < 1");
  const double nn = static_cast<double>(n);
  const KsTail tail = ks_sf(n, std::sqrt(nn) * x, KsMethod::exact);
  if (tail.log_survival == kNegInf) {
    throw NumericError("KS survival is zero in working precision at n=" + std::to_string(n));
  }
  return -tail.log_survival / (nn * x * x);
}

}  // namespace arelab
