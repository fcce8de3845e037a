#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arelab/rng.hpp"

namespace arelab {

// A density f on (0, 1) that drives the local alternative 1 - theta + theta f.
//
// Two families are supported:
//   * power_tail(r):  f(t) = (1 - r) t^(-r), 0 < r < 1, with closed-form CDF
//     t^(1 - r) and the SIMD sampling/likelihood kernels;
//   * custom:         any nonnegative evaluator. When no CDF is supplied one
//     is built once by adaptive quadrature over cached panels.
//
// Values are immutable and cheap to copy (custom state is shared).
class DensitySpec {
 public:
  using Function = std::function<double(double)>;

  static DensitySpec power_tail(double r);
  static DensitySpec custom(Function density, Function cdf = {}, std::string name = "custom");

  bool is_power_tail() const noexcept { return custom_ == nullptr; }
  // r of the power-tail family; DomainError for custom densities.
  double tail_exponent() const;
  std::string name() const;

  double density(double t) const;
  // CDF of f, clamped to [0, 1] outside the unit interval.
  double cdf(double t) const;

 private:
  struct Custom;
  DensitySpec() = default;

  double r_ = 0.0;
  std::shared_ptr<const Custom> custom_;
};

// p(t) = 1 - theta + theta f(t) with theta strictly inside (0, 1).
class LocalAlternative {
 public:
  LocalAlternative(DensitySpec spec, double theta);

  // Builds the alternative 1 + theta_normalized a(t), a = (f - 1)/c, i.e. the
  // raw mixing weight theta_normalized / c. Requires f square integrable.
  static LocalAlternative from_normalized(const DensitySpec& spec, double theta_normalized);

  const DensitySpec& spec() const noexcept { return spec_; }
  double theta() const noexcept { return theta_; }

 private:
  DensitySpec spec_;
  double theta_;
};

// The mixture evaluators accept theta in [0, 1] so that the degenerate
// endpoints stay evaluable; LocalAlternative itself never holds them.
double density_value(const DensitySpec& spec, double theta, double t);
double density_value(const LocalAlternative& alt, double t);

// log p(t): log1p(theta (f - 1)) while |theta (f - 1)| <= 1/2, plain log beyond.
double log_density(const DensitySpec& spec, double theta, double t);
double log_density(const LocalAlternative& alt, double t);

double cdf_value(const DensitySpec& spec, double theta, double t);
double cdf_value(const LocalAlternative& alt, double t);

// Inverse of cdf_value to absolute tolerance 1e-12 in u.
double quantile(const DensitySpec& spec, double theta, double u);
double quantile(const LocalAlternative& alt, double u);

// n i.i.d. draws by inverse transform of stream elements [0, n).
std::vector<double> sample_alternative(const DensitySpec& spec, double theta, std::size_t n,
                                       const rng::Stream& stream);
std::vector<double> sample_alternative(const LocalAlternative& alt, std::size_t n,
                                       const rng::Stream& stream);

// a(t) = (f(t) - 1)/c with c^2 = int (f - 1)^2.
class NormalizedScore {
 public:
  const DensitySpec& spec() const noexcept { return spec_; }
  double c() const noexcept { return c_; }

  double a(double t) const;
  // A(t) = int_0^t a(u) du.
  double primitive(double t) const;

 private:
  friend NormalizedScore normalize_score(const DensitySpec& spec);
  NormalizedScore(DensitySpec spec, double c) : spec_(std::move(spec)), c_(c) {}

  DensitySpec spec_;
  double c_;
};

// DomainError when f is not square integrable (power tail with r >= 1/2).
NormalizedScore normalize_score(const DensitySpec& spec);

// Raw primitive int_0^t (f(u) - 1) du = F_f(t) - t.
double primitive_A(const DensitySpec& spec, double t);
// Normalized primitive int_0^t a(u) du.
double primitive_A(const NormalizedScore& score, double t);

// Location of the maximizer of |A| and the maximum.
struct SupNorm {
  double value = 0.0;
  double argmax = 0.0;
};

// ||A||_inf. Closed form for the power tail, grid scan plus golden-section
// refinement for custom densities.
SupNorm sup_norm_A_detail(const NormalizedScore& score);
double sup_norm_A(const NormalizedScore& score);

// Moment-growth rate: theta^(1/(2r)) for r > 1/2, theta sqrt(log(1/theta)) at r = 1/2.
double kappa(double r, double theta);

struct HeavyTailOptions {
  std::size_t grid_points = 10000;
  double grid_min = 1e-14;
  // C2 = margin * max(1, observed upper envelope).
  double margin = 1.01;
  // Largest tolerated |d log(f(t) t^r) / d log t| over the lowest decades.
  double trend_tolerance = 0.02;
  double trend_decades = 4.0;
};

struct HeavyTailCertificate {
  double r = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  std::size_t grid_points_checked = 0;
  double grid_min = 0.0;
};

// Finds C1 in (0, (1-r)^r] and C2 > 1 with
//   C1 t^-r <= f(t) <= C2 t^-r  on (0, C1^(1/r)),   f(t) <= C2 on [C1^(1/r), 1)
// over a log-spaced grid. Throws DomainError when r is outside [1/2, 1) and
// ConditionViolated naming the worst grid point when no constants exist.
HeavyTailCertificate check_heavy_tail(const DensitySpec& spec, double r,
                                      const HeavyTailOptions& options = {});

}  // namespace arelab
