#pragma once

// Asymptotic solution of the Abel equation for f_a near its parabolic point.
//
// In the coordinate w = -1/(a z) the map f_a becomes the rational map
//
//     F(w) = w^3 / (w^2 - w + s),   s = 1/a^2,
//
// so F(w) = w + 1 + resit/w + O(w^-2) with resit = 1 - s.  A Fatou coordinate
// Phi with Phi(F(w)) = Phi(w) + 1 has the asymptotic expansion
//
//     Phi(w) ~ w - resit * L(w) + sum_{k>=1} b_k w^-k,
//
// with L(w) = Log w on the attracting side (w -> +inf) and L(w) = Log(-w) on
// the repelling side (w -> -inf).  The coefficients b_k are real for real a
// and are the same on both sides.  They are found order by order from formal
// power series in u = 1/w: with D(u) = 1 - u + s u^2, F = w / D(u) and the
// Abel equation at order u^m reads
//
//     [1/D]_{m+1} + resit [log D]_m + sum_{j<m} b_j [D^j]_{m-j} = 0,
//
// whose last term (j = m - 1) contributes -(m - 1) b_{m-1}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "plab/errors.hpp"

namespace plab {

namespace detail {

using Series = std::vector<double>;

inline Series series_mul(const Series& p, const Series& q) {
  const std::size_t n = p.size();
  Series r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; i + j < n; ++j) r[i + j] += p[i] * q[j];
  return r;
}

/// 1/p for p[0] != 0.
inline Series series_reciprocal(const Series& p) {
  const std::size_t n = p.size();
  Series r(n, 0.0);
  r[0] = 1.0 / p[0];
  for (std::size_t k = 1; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) acc += p[j] * r[k - j];
    r[k] = -acc / p[0];
  }
  return r;
}

/// log p for p[0] == 1, from p L' = p'.
inline Series series_log(const Series& p) {
  const std::size_t n = p.size();
  Series l(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    double acc = static_cast<double>(k) * p[k];
    for (std::size_t j = 1; j < k; ++j) acc -= static_cast<double>(j) * l[j] * p[k - j];
    l[k] = acc / static_cast<double>(k);
  }
  return l;
}

}  // namespace detail

class AbelSeries {
 public:
  static constexpr int kDefaultTerms = 16;
  /// Smallest |w| at which the truncated expansion is trusted.
  static constexpr double kMinEntryRadius = 20.0;

  explicit AbelSeries(double a, int terms = kDefaultTerms) : a_(a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw invalid_input("Abel series needs a > 0");
    if (terms < 2) throw invalid_input("Abel series needs at least two terms");
    const double s = 1.0 / (a * a);
    resit_ = 1.0 - s;

    const std::size_t order = static_cast<std::size_t>(terms) + 3;
    detail::Series d(order, 0.0);
    d[0] = 1.0;
    d[1] = -1.0;
    d[2] = s;
    const auto inv_d = detail::series_reciprocal(d);
    const auto log_d = detail::series_log(d);

    std::vector<detail::Series> d_powers{detail::Series(order, 0.0)};
    d_powers[0][0] = 1.0;
    for (int j = 1; j <= terms; ++j) d_powers.push_back(detail::series_mul(d_powers.back(), d));

    coeffs_.assign(static_cast<std::size_t>(terms) + 1, 0.0);  // coeffs_[k] = b_k, coeffs_[0] unused
    for (int m = 2; m <= terms + 1; ++m) {
      double rest = inv_d[m + 1] + resit_ * log_d[m];
      for (int j = 1; j <= m - 2; ++j) rest += coeffs_[j] * d_powers[j][m - j];
      coeffs_[m - 1] = rest / static_cast<double>(m - 1);
    }

    const double tail = std::abs(coeffs_.back());
    entry_radius_ = std::max(kMinEntryRadius, std::pow(tail / 1e-15, 1.0 / terms));
  }

  double a() const { return a_; }
  double resit() const { return resit_; }
  int terms() const { return static_cast<int>(coeffs_.size()) - 1; }
  /// b_1 .. b_K.
  std::span<const double> coefficients() const { return std::span<const double>(coeffs_).subspan(1); }
  /// |w| beyond which the omitted tail is below ~1e-15.
  double entry_radius() const { return entry_radius_; }

  cplx attracting(cplx w) const { return w - resit_ * std::log(w) + tail(w); }
  cplx repelling(cplx w) const { return w - resit_ * std::log(-w) + tail(w); }
  /// d Phi / dw, identical on both sides.
  cplx derivative(cplx w) const {
    const cplx u = 1.0 / w;
    cplx acc{};
    for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) acc = acc * u + static_cast<double>(k) * coeffs_[k];
    return 1.0 - resit_ * u - acc * u * u;
  }

  /// Solves attracting(w) = zeta for w deep in the attracting sector.
  cplx invert_attracting(cplx zeta) const { return invert(zeta, false); }
  /// Solves repelling(w) = zeta for w deep in the repelling sector.
  cplx invert_repelling(cplx zeta) const { return invert(zeta, true); }

 private:
  cplx tail(cplx w) const {
    const cplx u = 1.0 / w;
    cplx acc{};
    for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) acc = (acc + coeffs_[k]) * u;
    return acc;
  }

  cplx invert(cplx zeta, bool repelling_side) const {
    auto phi = [&](cplx w) { return repelling_side ? repelling(w) : attracting(w); };
    cplx w = zeta + resit_ * (repelling_side ? std::log(-zeta) : std::log(zeta));
    cplx residual = phi(w) - zeta;
    const double target = 1e-14 * std::max(1.0, std::abs(zeta));
    for (int it = 0; it < 60 && std::abs(residual) > target; ++it) {
      const cplx step = residual / derivative(w);
      double damping = 1.0;
      cplx trial = w - step;
      cplx trial_residual = phi(trial) - zeta;
      while (!(std::abs(trial_residual) < std::abs(residual)) && damping > 1e-6) {
        damping *= 0.5;
        trial = w - damping * step;
        trial_residual = phi(trial) - zeta;
      }
      if (!(std::abs(trial_residual) < std::abs(residual))) break;
      w = trial;
      residual = trial_residual;
    }
    if (!(std::abs(residual) <= 1e-10 * std::max(1.0, std::abs(zeta))))
      throw numerical_failure("inversion of the asymptotic Fatou coordinate did not converge", w,
                              std::abs(residual));
    return w;
  }

  double a_;
  double resit_ = 0.0;
  std::vector<double> coeffs_;
  double entry_radius_ = kMinEntryRadius;
};

}  // namespace plab
