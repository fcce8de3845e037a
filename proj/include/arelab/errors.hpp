#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arelab {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Quadrature, root finding or a series failed to reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

// The requested method cannot handle the input size (e.g. exact KS
// distribution for a huge band width).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Monte Carlo estimation could not resolve the requested quantity.
class EstimationError : public Error {
 public:
  EstimationError(const std::string& what, double partial_estimate, std::size_t hits)
      : Error(what), partial_estimate_(partial_estimate), hits_(hits) {}

  double partial_estimate() const noexcept { return partial_estimate_; }
  std::size_t hits() const noexcept { return hits_; }

 private:
  double partial_estimate_;
  std::size_t hits_;
};

// A hypothesis on the alternative density does not hold on the checked grid.
class ConditionViolated : public Error {
 public:
  ConditionViolated(const std::string& what, double worst_t)
      : Error(what), worst_t_(worst_t) {}

  double worst_t() const noexcept { return worst_t_; }

 private:
  double worst_t_;
};

// The sample-size search reached the grid ceiling without a verified crossing.
class SearchExhausted : public Error {
 public:
  SearchExhausted(const std::string& what, std::size_t best_n, double best_power)
      : Error(what), best_n_(best_n), best_power_(best_power) {}

  std::size_t best_n() const noexcept { return best_n_; }
  double best_power() const noexcept { return best_power_; }

 private:
  std::size_t best_n_;
  double best_power_;
};

}  // namespace arelab
