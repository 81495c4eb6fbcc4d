#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace invgauss {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

// Carries the best estimate reached before the subdivision budget ran out.
struct NonConvergence : std::runtime_error {
  std::complex<double> best;
  double err;
  NonConvergence(const std::string& what, std::complex<double> best_, double err_)
      : std::runtime_error(what), best(best_), err(err_) {}
};

struct MonteCarloVariance : std::runtime_error {
  double value;
  double stderr_;
  MonteCarloVariance(const std::string& what, double v, double se)
      : std::runtime_error(what), value(v), stderr_(se) {}
};

struct AdmissibilityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateAtom : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DiagonalProximity : DomainError {
  using DomainError::DomainError;
};

}  // namespace invgauss
