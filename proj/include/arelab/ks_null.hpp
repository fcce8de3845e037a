#pragma once

#include <cstddef>
#include <cstdint>

namespace arelab {

enum class KsMethod { exact, asymptotic, monte_carlo };

// P0(K_n >= u) on the sqrt(n) scale.
struct KsTail {
  std::size_t n = 0;         // 0 together with asymptotic = true for the limit law
  bool asymptotic = false;
  double u = 0.0;
  double survival = 0.0;
  double log_survival = 0.0;  // kept when survival underflows
  KsMethod method = KsMethod::exact;
  double standard_error = 0.0;  // monte_carlo only
  std::size_t replicates = 0;   // monte_carlo only
};

struct KsMonteCarloOptions {
  std::uint64_t seed = 0x5eed;
  std::size_t replicates = 1'000'000;
  std::size_t threads = 0;
};

KsTail ks_sf(std::size_t n, double u, KsMethod method, const KsMonteCarloOptions& mc = {});

// Kolmogorov limit: 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
double ks_sf_asymptotic(double lambda);
// log of the above, accurate deep in the tail.
double ks_log_sf_asymptotic(double lambda);

// P0(D_n < d) by the Marsaglia-Tsang-Wang matrix power. CapabilityError when
// the band matrix would exceed kMaxExactBand.
double ks_cdf_exact(std::size_t n, double d);
inline constexpr std::size_t kMaxExactBand = 1201;

// log P0(D_n >= d) from the Smirnov-Birnbaum-Tingey one-sided sum (all terms
// positive, summed in log space) doubled; the dropped two-sided intersection
// is below exp(-6 n d^2) relative. Used for deep tails.
double ks_log_sf_tail(std::size_t n, double d);

// Smallest u with P0(K_n >= u) <= alpha under the exact method, to 1e-9.
// alpha = 1 returns the lower edge of the support, 1/(2 sqrt(n)).
double ks_critical(std::size_t n, double alpha);
// lambda with ks_sf_asymptotic(lambda) = alpha.
double ks_critical_asymptotic(double alpha);

// -log P0(K_n >= sqrt(n) x) / (n x^2), evaluated in log space.
double moddev_rate_ks(std::size_t n, double x);

}  // namespace arelab
