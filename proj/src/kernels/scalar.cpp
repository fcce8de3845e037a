#include <algorithm>
#include <cfloat>
#include <cmath>

#include "arelab/rng.hpp"
#include "kernel_tables.hpp"

namespace arelab::kernels::detail {

namespace {

void philox_uniforms(std::uint32_t k0, std::uint32_t k1, std::uint64_t stream,
                     std::uint64_t first_block, double* out, std::size_t blocks) {
  const rng::PhiloxKey key{k0, k1};
  const auto s_lo = static_cast<std::uint32_t>(stream);
  const auto s_hi = static_cast<std::uint32_t>(stream >> 32);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::uint64_t block = first_block + b;
    const rng::PhiloxCounter w = rng::philox4x32_10(
        {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), s_lo, s_hi},
        key);
    out[2 * b] = rng::bits_to_open_unit((static_cast<std::uint64_t>(w[1]) << 32) | w[0]);
    out[2 * b + 1] = rng::bits_to_open_unit((static_cast<std::uint64_t>(w[3]) << 32) | w[2]);
  }
}

inline double log_density_one(double x, double theta, double r) {
  const double f = (1.0 - r) * std::pow(x, -r);
  const double y = theta * (f - 1.0);
  return std::fabs(y) <= 0.5 ? std::log1p(y) : std::log((1.0 - theta) + theta * f);
}

void power_tail_log_density(const double* x, double* out, std::size_t n, PowerTailParams p) {
  for (std::size_t i = 0; i < n; ++i) out[i] = log_density_one(x[i], p.theta, p.r);
}

double power_tail_log_density_sum(const double* x, std::size_t n, PowerTailParams p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += log_density_one(x[i], p.theta, p.r);
  return sum;
}

// Newton on the concave CDF F(t) = (1 - theta) t + theta t^(1-r). Any Newton
// iterate of a concave increasing function lands left of the root, and from
// the left the iteration increases monotonically, so after the first step the
// sequence is bracketed by [t_lo, root].
double quantile_one(double u, double theta, double r) {
  if (theta == 0.0) return u;
  const double a = 1.0 - theta;
  const double b = theta;
  const double q = 1.0 / (1.0 - r);
  const double t_up = std::max(std::min(a > 0.0 ? u / a : HUGE_VAL, std::pow(u / b, q)), DBL_MIN);
  const double t_lo =
      std::max(std::min(a > 0.0 ? 0.5 * u / a : HUGE_VAL, std::pow(0.5 * u / b, q)), DBL_MIN);
  double t = t_up;
  for (int it = 0; it < kQuantileMaxIterations; ++it) {
    const double pr = std::pow(t, -r);
    const double F = a * t + b * t * pr;
    const double dF = a + b * (1.0 - r) * pr;
    double next = t - (F - u) / dF;
    next = std::max(t_lo, std::min(next, t_up));
    const bool done = std::fabs(next - t) <= kQuantileRelStep * next;
    t = next;
    if (done) break;
  }
  return t;
}

void power_tail_quantile(double* values, std::size_t n, PowerTailParams p) {
  for (std::size_t i = 0; i < n; ++i) values[i] = quantile_one(values[i], p.theta, p.r);
}

double ks_max_gap(const double* sorted, std::size_t n) {
  const double nn = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double idx = static_cast<double>(i);
    const double plus = (idx + 1.0) / nn - sorted[i];
    const double minus = sorted[i] - idx / nn;
    d = std::max(d, std::max(plus, minus));
  }
  return d;
}

bool band_exceeded(const double* sorted, const double* lower, const double* upper,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (sorted[i] <= lower[i] || sorted[i] >= upper[i]) return true;
  }
  return false;
}

}  // namespace

const KernelTable kScalarTable{
    Isa::scalar,
    "scalar",
    &philox_uniforms,
    &power_tail_log_density,
    &power_tail_log_density_sum,
    &power_tail_quantile,
    &ks_max_gap,
    &band_exceeded,
};

}  // namespace arelab::kernels::detail
