#pragma once

#include <cstddef>

#include "arelab/alt_model.hpp"

namespace arelab {

// First two moments of log p(X) under the null (uniform) and the alternative.
struct MomentSet {
  double e0 = 0.0;    // int log p
  double var0 = 0.0;  // int (log p - e0)^2
  double e1 = 0.0;    // int p log p
  double var1 = 0.0;  // int p (log p - e1)^2
  double theta = 0.0;
  double quadrature_error_estimate = 0.0;

  double sigma0() const noexcept;
  double sigma1() const noexcept;
};

// All four moments by singularity-aware quadrature. NumericError if the
// combined error estimate exceeds tol.
MomentSet log_moments(const LocalAlternative& alt, double tol = 1e-10);

// b_n = sqrt(n) (e1 - e0) / sigma0.
double shift_b(const MomentSet& m, std::size_t n);

// I_km = int [theta g]^k log^m(1 + theta g),  g = f - 1,  k in {0, 1}, m >= 1.
double integral_I(int k, int m, const LocalAlternative& alt, double tol = 1e-8);

// J_km = int [1 + theta g]^k |log(1 + theta g) - e0|^m.
double integral_J(int k, int m, const LocalAlternative& alt, double e0, double tol = 1e-8);

}  // namespace arelab
