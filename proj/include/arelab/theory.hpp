#pragma once

#include <cstddef>

#include "arelab/alt_model.hpp"
#include "arelab/moments.hpp"
#include "arelab/power_engine.hpp"

namespace arelab {

// Intermediate slopes in the normalized parametrization p = 1 + theta a.
struct SlopePair {
  double ks_slope = 0.0;  // 2 n theta^2 ||A||^2
  double np_slope = 0.0;  // n theta^2 / 2
  std::size_t n = 0;
  double theta = 0.0;
};

// 1 / (4 ||A||_inf^2).
double efficiency_theoretical(const NormalizedScore& score);

// Closed form for f_r: (1 - r)^(2 - 2/r) / (4 (1 - 2r)), 0 < r < 1/2.
// DomainError for r >= 1/2 where the efficiency is infinite.
double efficiency_power_family(double r);

// theta is the normalized mixing weight.
SlopePair slopes(std::size_t n, double theta, const NormalizedScore& score);

// min(1, 2 exp(-x^2 / (2 (1 + x M / sqrt(n))))).
double bernstein_bound(double x, double M, std::size_t n);

// M_n = 6 r / sigma0 for the power-tail family.
double bernstein_scale(double r, const MomentSet& m);

// Lower edge of the window 2 delta sigma0 < x < 2 (1 - delta) sigma0.
inline constexpr double kModerateDeviationDelta = 0.1;

struct ModerateDeviationRate {
  double rate = 0.0;  // -log P0(V_n >= sqrt(n) x) / (n x^2)
  TailEstimate tail{};
  double sigma0 = 0.0;
};

// Square-integrable f: requires x inside the window above (DomainError
// otherwise). Heavy-tailed power family: no window, the rate is only expected
// to stay positive.
ModerateDeviationRate np_moddev_rate_detail(const LocalAlternative& alt, std::size_t n, double x,
                                            const SimulationConfig& cfg);
double np_moddev_rate(const LocalAlternative& alt, std::size_t n, double x,
                      const SimulationConfig& cfg);

}  // namespace arelab
