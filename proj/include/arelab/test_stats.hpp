#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "arelab/alt_model.hpp"
#include "arelab/moments.hpp"

namespace arelab {

// Observations strictly inside (0, 1).
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t n() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
};

// Sum of log p(X_i), using the SIMD kernel for the power-tail family.
double log_likelihood_sum(std::span<const double> x, const LocalAlternative& alt);

// V_n = (1 / (sqrt(n) sigma0)) sum (log p(X_i) - e0).
double np_statistic(const Sample& s, const LocalAlternative& alt, const MomentSet& m);

// K_n = sqrt(n) sup_t |F_n(t) - t|, from the sorted-sample gap formula.
double ks_statistic(const Sample& s);
// Same for data already sorted ascending; no validation.
double ks_statistic_sorted(std::span<const double> sorted);

}  // namespace arelab
