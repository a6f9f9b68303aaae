#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace plab {

using cplx = std::complex<double>;

/// Rejected arguments: out-of-domain parameters, bad budgets, malformed flags.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that ran but did not reach its tolerance or budget.
/// Carries the best iterate seen and its residual so callers can report them.
class numerical_failure : public std::runtime_error {
 public:
  explicit numerical_failure(const std::string& what,
                             cplx best = {std::numeric_limits<double>::quiet_NaN(), 0.0},
                             double residual = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), best_(best), residual_(residual) {}

  cplx best_estimate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }

 private:
  cplx best_;
  double residual_;
};

}  // namespace plab
