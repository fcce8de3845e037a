#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "arelab/alt_model.hpp"
#include "arelab/moments.hpp"

namespace arelab {

enum class PowerSmoothing { isotonic, window };
enum class LevelMode { fixed_level, shift };

// Geometric sample-size grid: g0 = start, g_{j+1} = max(g_j + 1, round(g_j * ratio)).
struct GridSpec {
  std::size_t start = 1;
  double ratio = 1.08;
  std::size_t max_n = 200000;
  bool refine = true;  // one bisection level between the crossing and its predecessor

  std::size_t point(std::size_t index) const;
};

// The reproducibility contract of every Monte Carlo operation.
struct SimulationConfig {
  std::uint64_t seed = 20240917;
  std::size_t replicates = 20000;
  std::size_t oracle_replicates = 1'000'000;
  GridSpec grid{};
  PowerSmoothing smoothing = PowerSmoothing::isotonic;
  std::size_t smoothing_window = 3;
  std::size_t verification_window = 3;
  double alpha = 0.05;
  LevelMode mode = LevelMode::fixed_level;
  double shift_x = 0.0;  // x of the critical value x + b_n in shift mode
  std::size_t threads = 0;

  // DomainError on violated invariants.
  void validate() const;
};

struct PowerEstimate {
  double power = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
  double level = 0.0;
  double critical_value = 0.0;
  std::size_t replicates = 0;
};

// A tail probability with its Monte Carlo diagnostics.
struct TailEstimate {
  double probability = 0.0;
  double log_probability = -std::numeric_limits<double>::infinity();
  double standard_error = 0.0;
  std::size_t hits = 0;
  std::size_t replicates = 0;
  bool importance_sampled = false;
};

struct GridEvaluation {
  std::size_t grid_index = 0;  // index in the geometric grid; refinement points use SIZE_MAX
  std::size_t n = 0;
  double raw_power = 0.0;
  double standard_error = 0.0;
  double smoothed_power = 0.0;
};

struct CrossingDiagnostics {
  std::vector<GridEvaluation> evaluations;  // sorted by n
  std::size_t crossing_grid_n = 0;          // first verified grid point
  bool verification_passed = false;
  std::size_t windows_rejected = 0;
};

struct SampleSizeResult {
  std::size_t N = 0;
  double ratio = 0.0;
  double target_power = 0.0;
  std::size_t n_np = 0;
  double level = 0.0;
  PowerEstimate np_power{};
  PowerEstimate ks_power_at_N{};
  CrossingDiagnostics crossing_diagnostics{};
};

// Empirical (1 - alpha)-quantile of V_n over cfg.replicates null samples.
// EstimationError when replicates * alpha < 10.
double np_null_quantile(const LocalAlternative& alt, std::size_t n, double alpha,
                        const SimulationConfig& cfg);
double np_null_quantile(const LocalAlternative& alt, const MomentSet& m, std::size_t n,
                        double alpha, const SimulationConfig& cfg);

// P0^n(V_n >= threshold). Plain Monte Carlo first; with fewer than 50 hits the
// estimate switches to importance sampling from p_theta (weights 1/prod p).
TailEstimate np_null_tail(const LocalAlternative& alt, const MomentSet& m, std::size_t n,
                          double threshold, const SimulationConfig& cfg);

// alpha_n = P0^n(V_n >= x + b_n).
TailEstimate np_level_from_shift(const LocalAlternative& alt, std::size_t n, double x,
                                 const SimulationConfig& cfg);

// P_theta^n(V_n >= critical).
PowerEstimate power_np(const LocalAlternative& alt, std::size_t n, double critical,
                       const SimulationConfig& cfg);
PowerEstimate power_np(const LocalAlternative& alt, const MomentSet& m, std::size_t n,
                       double critical, const SimulationConfig& cfg);

// P_theta^n(K_n >= ks_critical(n, alpha)).
PowerEstimate power_ks(const LocalAlternative& alt, std::size_t n, double alpha,
                       const SimulationConfig& cfg);
// Same at a given critical value u on the sqrt(n) scale.
PowerEstimate power_ks_at(const LocalAlternative& alt, std::size_t n, double u,
                          const SimulationConfig& cfg);

// Reference path for power_ks_at: draws X by inverse transform and evaluates
// K_n directly instead of comparing sorted uniforms with mapped bands.
PowerEstimate power_ks_direct(const LocalAlternative& alt, std::size_t n, double u,
                              const SimulationConfig& cfg);

using PowerCurve = std::function<PowerEstimate(std::size_t n)>;

// Smallest grid point whose smoothed power reaches target and whose next
// cfg.verification_window grid points also do. SearchExhausted past max_n.
SampleSizeResult find_sample_size(const PowerCurve& curve, double target_power,
                                  const SimulationConfig& cfg);

// KS at the fixed level alpha on the grid starting at cfg.grid.start.
SampleSizeResult find_sample_size_ks(const LocalAlternative& alt, double target_power,
                                     double alpha, const SimulationConfig& cfg);

// NP power at n_np, then the KS sample size reaching it. In shift mode the
// common level is alpha_n = P0(V_n >= x + b_n) instead of alpha.
SampleSizeResult efficiency_ratio_empirical(const LocalAlternative& alt, std::size_t n_np,
                                            double alpha, const SimulationConfig& cfg);

// Pool-adjacent-violators fit, nondecreasing, weighted.
std::vector<double> isotonic_fit(const std::vector<double>& values,
                                 const std::vector<double>& weights);

// Monte Carlo moments of log p(X) for cross-checking quadrature.
struct MonteCarloMoments {
  double e0 = 0.0, e0_se = 0.0;
  double var0 = 0.0, var0_se = 0.0;
  double e1 = 0.0, e1_se = 0.0;
  double var1 = 0.0, var1_se = 0.0;
  std::size_t draws = 0;
};
MonteCarloMoments monte_carlo_moments(const LocalAlternative& alt, std::size_t draws,
                                      std::uint64_t seed, std::size_t threads = 0);

}  // namespace arelab
