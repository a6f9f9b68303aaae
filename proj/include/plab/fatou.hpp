#pragma once

// Attracting and repelling Fatou coordinates of f_a at the parabolic point 0,
// normalized to commute with complex conjugation.
//
// Attracting side: iterate z forward until w = -1/(a z) enters the petal
// sector {Re w >= W, |Im w| <= Re w}, then psi_att(z) = Phi_att(w_n) - n.
// Repelling side: pull z back along the inverse branch of f_a fixing 0 until
// w enters {Re w <= -W, |Im w| <= -Re w}, then psi_rep(z) = Phi_rep(w_-n) + n.
// Phi is the truncated asymptotic solution of the Abel equation (AbelSeries),
// so no extrapolation in n is needed; the returned residual is the measured
// Abel defect |psi(f(z)) - psi(z) - 1| along the next few orbit points.
//
// Real parts carry no extra constant: the limit formula itself pins them, and
// only imaginary parts (Ecalle heights) are conformally meaningful.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "plab/abel_series.hpp"
#include "plab/core_dynamics.hpp"
#include "plab/errors.hpp"

namespace plab {

enum class FatouDirection { Attracting, Repelling };

struct FatouValue {
  cplx value{};
  FatouDirection direction = FatouDirection::Attracting;
  long iterations_used = 0;
  double residual = 0.0;
};

struct EcalleHeight {
  double h = 0.0;
  FatouValue plus;   // psi_att(c_+)
  FatouValue minus;  // psi_att(c_-)
};

struct FatouOptions {
  long max_iter = 1'000'000;
  double escape_radius = kDefaultEscapeRadius;
  int check_steps = 8;
  int max_deepenings = 6;
};

inline constexpr double kDefaultTol = 1e-6;
/// Bisection bracket for the inverse of the height map.
inline constexpr double kHeightBracketLo = 0.05;
inline constexpr double kHeightBracketHi = std::numbers::sqrt3 - 0.001;

class FatouCoordinates {
 public:
  explicit FatouCoordinates(Per1Param p, FatouOptions options = {})
      : param_((require_interval(p), p)), map_(GenericCubic::per1(p)), series_(p.a), options_(options) {}

  Per1Param param() const { return param_; }
  const AbelSeries& series() const { return series_; }
  const GenericCubic& map() const { return map_; }

  cplx to_w(cplx z) const { return -1.0 / (param_.a * z); }
  cplx from_w(cplx w) const { return -1.0 / (param_.a * w); }

  bool in_attracting_petal(cplx w) const {
    return w.real() >= series_.entry_radius() && std::abs(w.imag()) <= w.real();
  }
  bool in_repelling_petal(cplx w) const {
    return -w.real() >= series_.entry_radius() && std::abs(w.imag()) <= -w.real();
  }

  FatouValue attracting(cplx z, double tol = kDefaultTol) const {
    if (z == cplx{}) throw invalid_input("the parabolic fixed point has no Fatou coordinate");
    const double r2 = options_.escape_radius * options_.escape_radius;
    long n = 0;
    while (!in_attracting_petal(to_w(z))) {
      z = map_(z);
      ++n;
      if (!(std::norm(z) <= r2)) throw numerical_failure("not in parabolic basin: orbit escaped", z);
      if (z == cplx{}) throw numerical_failure("orbit lands exactly on the parabolic point", z);
      if (n > options_.max_iter) throw numerical_failure("attracting petal not reached within budget", z);
    }
    for (int round = 0;; ++round) {
      auto [value, residual] = attracting_estimate(z, n);
      if (residual <= 0.5 * tol) return {value, FatouDirection::Attracting, n, residual};
      if (round == options_.max_deepenings || n > options_.max_iter)
        throw numerical_failure("attracting Fatou coordinate did not reach tolerance", value, residual);
      const long stride = std::max(64L, n);
      for (long k = 0; k < stride; ++k) z = map_(z);
      n += stride;
    }
  }

  FatouValue repelling(cplx z, double tol = kDefaultTol) const {
    if (z == cplx{}) throw invalid_input("the parabolic fixed point has no Fatou coordinate");
    long n = 0;
    while (!in_repelling_petal(to_w(z))) {
      z = backward_step(z);
      ++n;
      if (n > options_.max_iter) throw numerical_failure("repelling petal not reached within budget", z);
    }
    for (int round = 0;; ++round) {
      auto [value, residual] = repelling_estimate(z, n);
      if (residual <= 0.5 * tol) return {value, FatouDirection::Repelling, n, residual};
      if (round == options_.max_deepenings || n > options_.max_iter)
        throw numerical_failure("repelling Fatou coordinate did not reach tolerance", value, residual);
      const long stride = std::max(64L, n);
      for (long k = 0; k < stride; ++k) z = backward_step(z);
      n += stride;
    }
  }

  /// z with psi_rep(z) = zeta: solve Phi_rep(w) = zeta - n deep in the
  /// repelling sector, then push the point forward n times.
  cplx repelling_inverse(cplx zeta) const {
    if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag()))
      throw invalid_input("repelling coordinate must be finite");
    const double depth = series_.entry_radius() + std::abs(zeta.imag());
    const double log_shift = std::abs(series_.resit()) * std::log(depth + std::abs(zeta) + 2.0);
    const long n = std::max(0L, static_cast<long>(std::ceil(zeta.real() + depth + log_shift + 2.0)));
    const cplx w = series_.invert_repelling(zeta - static_cast<double>(n));
    if (!in_repelling_petal(w))
      throw numerical_failure("asymptotic inverse landed outside the repelling petal", from_w(w));
    cplx z = from_w(w);
    for (long k = 0; k < n; ++k) {
      z = map_(z);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw numerical_failure("forward push of the inverse repelling coordinate overflowed");
    }
    return z;
  }

  /// One step of the inverse branch of f_a fixing 0, by Newton from a series seed.
  cplx backward_step(cplx z) const {
    const double a = param_.a;
    cplx y = z + (-a + (2.0 * a * a - 1.0) * z) * z * z;
    for (int it = 0; it < 40; ++it) {
      const cplx dy = (map_(y) - z) / map_.derivative(y);
      y -= dy;
      if (!(std::abs(dy) > 1e-17 * std::abs(y))) break;
    }
    const bool solved = std::abs(map_(y) - z) <= 1e-12 * std::abs(z);
    const bool moved_back = to_w(y).real() < to_w(z).real() - 0.5;
    if (!solved || !moved_back || !(std::abs(y) < 1.0))
      throw numerical_failure("backward orbit cannot be continued in the repelling petal", z);
    return y;
  }

  EcalleHeight critical_height(double tol = kDefaultTol) const {
    const auto crit = critical_points(param_);
    EcalleHeight out;
    out.plus = attracting(crit.plus, tol);
    out.minus = attracting(crit.minus, tol);
    out.h = out.plus.value.imag() - out.minus.value.imag();
    if (!(std::abs(out.plus.value.real() - out.minus.value.real()) < tol))
      throw numerical_failure("critical points have different real attracting coordinates",
                              out.plus.value - out.minus.value);
    return out;
  }

 private:
  struct Estimate {
    cplx value;
    double residual;
  };

  Estimate attracting_estimate(cplx z, long n) const {
    const cplx value = series_.attracting(to_w(z)) - static_cast<double>(n);
    cplx prev = value;
    double residual = 0.0;
    for (int j = 1; j <= options_.check_steps; ++j) {
      z = map_(z);
      const cplx cur = series_.attracting(to_w(z)) - static_cast<double>(n + j);
      residual = std::max(residual, std::abs(cur - prev));
      prev = cur;
    }
    return {value, residual};
  }

  Estimate repelling_estimate(cplx z, long n) const {
    const cplx value = series_.repelling(to_w(z)) + static_cast<double>(n);
    cplx prev = value;
    double residual = 0.0;
    for (int j = 1; j <= options_.check_steps; ++j) {
      z = backward_step(z);
      const cplx cur = series_.repelling(to_w(z)) + static_cast<double>(n + j);
      residual = std::max(residual, std::abs(cur - prev));
      prev = cur;
    }
    return {value, residual};
  }

  Per1Param param_;
  GenericCubic map_;
  AbelSeries series_;
  FatouOptions options_;
};

inline FatouValue attracting_coordinate(Per1Param p, cplx z, double tol = kDefaultTol) {
  return FatouCoordinates(p).attracting(z, tol);
}

inline FatouValue repelling_coordinate(Per1Param p, cplx z, double tol = kDefaultTol) {
  return FatouCoordinates(p).repelling(z, tol);
}

inline cplx repelling_coordinate_inverse(Per1Param p, cplx zeta) {
  return FatouCoordinates(p).repelling_inverse(zeta);
}

inline EcalleHeight critical_ecalle_height(Per1Param p, double tol = kDefaultTol) {
  return FatouCoordinates(p).critical_height(tol);
}

/// a(t) with critical Ecalle height t, by guarded bisection on
/// [kHeightBracketLo, kHeightBracketHi], where the height is decreasing in a.
inline Per1Param find_parameter_for_height(double t, double tol = kDefaultTol) {
  if (!(t > 0.0) || !std::isfinite(t)) throw invalid_input("height must be positive");
  auto height = [tol](double a) { return critical_ecalle_height(Per1Param{a}, tol).h; };
  double lo = kHeightBracketLo;
  double hi = kHeightBracketHi;
  double h_lo = height(lo);
  double h_hi = height(hi);
  if (!(h_hi < t && t < h_lo)) throw numerical_failure("height out of numerical range");
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double h_mid = height(mid);
    if (!(h_hi <= h_mid && h_mid <= h_lo)) throw numerical_failure("height map is not monotone on the bracket");
    if (std::abs(h_mid - t) <= 0.25 * tol) break;
    if (h_mid > t) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
      h_hi = h_mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return Per1Param{mid};
}

/// Derivative of the upper horn map at 0 (equivalently the lower one at
/// infinity): exp(2 pi^2 resit).
inline double horn_multiplier(Per1Param p) {
  require_interval(p);
  return std::exp(2.0 * std::numbers::pi * std::numbers::pi * p.resit());
}

struct HornDiagnostic {
  double multiplier = 0.0;
  double expected_im_offset = 0.0;  // pi * resit; the upper end carries -this, the lower end +this
  double height = 0.0;
  std::vector<cplx> upper_offsets;  // psi_att(z) - psi_rep(z) where Im psi_rep = +height
  std::vector<cplx> lower_offsets;  // same where Im psi_rep = -height
  cplx upper_mean{};
  cplx lower_mean{};
  double drift = 0.0;        // worst |Im mean offset -/+ pi resit| over the two ends
  double oscillation = 0.0;  // worst deviation of a single sample from its end's mean
};

/// Measures psi_att - psi_rep near the two ends of the cylinders.  Samples are
/// equispaced in Re psi_rep over one period, so their mean cancels the first
/// samples - 1 Fourier modes of the horn map and isolates its constant term.
inline HornDiagnostic horn_offset_diagnostic(Per1Param p, double height = 3.0, int samples = 4,
                                             double tol = kDefaultTol) {
  if (samples < 1) throw invalid_input("horn diagnostic needs at least one sample");
  const FatouCoordinates fc(p);
  HornDiagnostic d;
  d.multiplier = horn_multiplier(p);
  d.expected_im_offset = std::numbers::pi * p.resit();
  d.height = height;
  for (int k = 0; k < samples; ++k) {
    const double x = static_cast<double>(k) / samples;
    for (const double sign : {1.0, -1.0}) {
      const cplx zeta{x, sign * height};
      const cplx offset = fc.attracting(fc.repelling_inverse(zeta), tol).value - zeta;
      (sign > 0 ? d.upper_offsets : d.lower_offsets).push_back(offset);
    }
  }
  auto mean = [](const std::vector<cplx>& v) {
    cplx acc{};
    for (const cplx x : v) acc += x;
    return acc / static_cast<double>(v.size());
  };
  d.upper_mean = mean(d.upper_offsets);
  d.lower_mean = mean(d.lower_offsets);
  d.drift = std::max(std::abs(d.upper_mean.imag() + d.expected_im_offset),
                     std::abs(d.lower_mean.imag() - d.expected_im_offset));
  for (const cplx x : d.upper_offsets) d.oscillation = std::max(d.oscillation, std::abs(x - d.upper_mean));
  for (const cplx x : d.lower_offsets) d.oscillation = std::max(d.oscillation, std::abs(x - d.lower_mean));
  return d;
}

}  // namespace plab
