#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "plab/errors.hpp"

namespace plab {

namespace detail {

inline cplx principal_cbrt(cplx x) {
  if (x == cplx{}) return {};
  return std::polar(std::cbrt(std::abs(x)), std::arg(x) / 3.0);
}

inline cplx eval_monic_cubic(cplx b2, cplx b1, cplx b0, cplx z) {
  return ((z + b2) * z + b1) * z + b0;
}

}  // namespace detail

/// Roots of z^3 + b2 z^2 + b1 z + b0 = 0.
///
/// Depressed-cubic closed form (Cardano, taking the larger of the two
/// candidate u^3 to avoid cancellation) followed by `polish_steps` Newton
/// corrections per root.  A correction is kept only if it does not increase
/// |P|, so double roots (where P' vanishes) are left at the closed-form value.
/// A zero constant term deflates the exact root 0 first.
inline std::array<cplx, 3> solve_monic_cubic(cplx b2, cplx b1, cplx b0, int polish_steps = 2) {
  if (b0 == cplx{}) {
    const cplx root_disc = std::sqrt(b2 * b2 - 4.0 * b1);
    cplx big = -0.5 * (b2 + root_disc);
    if (const cplx alt = -0.5 * (b2 - root_disc); std::norm(alt) > std::norm(big)) big = alt;
    return {cplx{}, big, big == cplx{} ? cplx{} : b1 / big};
  }
  const cplx shift = b2 / 3.0;
  const cplx p = b1 - b2 * shift;
  const cplx q = (2.0 * shift * shift - b1) * shift + b0;

  const cplx half_q = 0.5 * q;
  const cplx third_p = p / 3.0;
  const cplx disc = std::sqrt(half_q * half_q + third_p * third_p * third_p);
  cplx u3 = -half_q + disc;
  if (const cplx alt = -half_q - disc; std::norm(alt) > std::norm(u3)) u3 = alt;

  const cplx u = detail::principal_cbrt(u3);
  const cplx v = (u == cplx{}) ? cplx{} : -third_p / u;

  const cplx omega{-0.5, 0.5 * std::numbers::sqrt3};
  std::array<cplx, 3> roots{u + v - shift,
                            omega * u + std::conj(omega) * v - shift,
                            std::conj(omega) * u + omega * v - shift};

  for (auto& r : roots) {
    for (int step = 0; step < polish_steps; ++step) {
      const cplx value = detail::eval_monic_cubic(b2, b1, b0, r);
      const cplx slope = (3.0 * r + 2.0 * b2) * r + b1;
      if (value == cplx{} || slope == cplx{}) break;
      const cplx candidate = r - value / slope;
      const cplx new_value = detail::eval_monic_cubic(b2, b1, b0, candidate);
      if (!(std::norm(new_value) <= std::norm(value))) break;
      r = candidate;
    }
  }
  return roots;
}

}  // namespace plab
