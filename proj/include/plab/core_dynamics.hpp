#pragma once

// Cubic maps, orbits, critical points and fixed points.
//
// Two families are in play.  The slice of cubics with a multiplier-1 fixed
// point at the origin,
//
//     f_a(z) = z + a z^2 + z^3,
//
// and the ambient monic cubics p(z) = z^3 + A z^2 + B z + C in which
// perturbations of f_a live.  f_a embeds as (A, B, C) = (a, 1, 0).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "plab/cubic_solver.hpp"
#include "plab/errors.hpp"

namespace plab {

inline constexpr double kDefaultEscapeRadius = 10.0;
inline constexpr long kDefaultMaxIter = 100000;
/// |lambda - 1| at or below this leaves the holomorphic index undefined.
inline constexpr double kIndexDegeneracy = 1e-9;
/// Roots closer than this are reported as one multiple root.
inline constexpr double kMultipleRootDistance = 1e-7;

/// Real parameter a of f_a(z) = z + a z^2 + z^3.
struct Per1Param {
  double a = 1.0;

  /// Residue fixed-point index at the origin, 1/a^2.
  double iota() const {
    if (a == 0.0) throw invalid_input("a = 0 is a double parabolic point; the index 1/a^2 is undefined");
    return 1.0 / (a * a);
  }
  /// Residu iteratif 1 - 1/a^2.
  double resit() const { return 1.0 - iota(); }

  bool in_interval() const { return a > 0.0 && a < std::numbers::sqrt3; }
  bool nondegenerate_critical() const { return std::abs(a * a - 3.0) > 1e-12; }
};

/// Throws unless a lies in the open interval (0, sqrt 3).
inline void require_interval(Per1Param p) {
  if (!std::isfinite(p.a) || !p.in_interval())
    throw invalid_input("parameter a must lie in (0, sqrt(3))");
}

inline double residue_index(Per1Param p) { return p.iota(); }
inline double resit(Per1Param p) { return p.resit(); }

/// p(z) = z^3 + A z^2 + B z + C.
struct GenericCubic {
  cplx A{};
  cplx B{};
  cplx C{};

  static constexpr GenericCubic per1(Per1Param p) { return {cplx{p.a, 0.0}, cplx{1.0, 0.0}, cplx{}}; }

  cplx operator()(cplx z) const { return ((z + A) * z + B) * z + C; }
  cplx derivative(cplx z) const { return (3.0 * z + 2.0 * A) * z + B; }
  /// p(z) - z, evaluated without the cancellation of subtracting z afterwards.
  cplx displacement(cplx z) const { return ((z + A) * z + (B - 1.0)) * z + C; }

  bool real_coefficients() const { return A.imag() == 0.0 && B.imag() == 0.0 && C.imag() == 0.0; }
};

inline cplx eval(const GenericCubic& map, cplx z) { return map(z); }

struct CriticalPoints {
  cplx plus;   // Im >= 0
  cplx minus;  // Im <= 0
};

/// Roots of 3z^2 + 2az + 1.  Strict conjugates for |a| < sqrt 3.
inline CriticalPoints critical_points(Per1Param p) {
  const double a = p.a;
  const double disc = 3.0 - a * a;
  if (disc > 0.0) {
    const double im = std::sqrt(disc) / 3.0;
    return {cplx{-a / 3.0, im}, cplx{-a / 3.0, -im}};
  }
  const double s = std::sqrt(-disc);
  return {cplx{(-a + s) / 3.0, 0.0}, cplx{(-a - s) / 3.0, 0.0}};
}

/// Critical points of a generic cubic; `plus` carries the larger imaginary part.
inline CriticalPoints critical_points(const GenericCubic& map) {
  const cplx s = std::sqrt(map.A * map.A - 3.0 * map.B);
  cplx c1 = (-map.A + s) / 3.0;
  cplx c2 = (-map.A - s) / 3.0;
  if (c1.imag() < c2.imag()) std::swap(c1, c2);
  return {c1, c2};
}

enum class OrbitVerdict { Bounded, Escaped };

struct OrbitClassification {
  OrbitVerdict verdict = OrbitVerdict::Bounded;
  std::optional<long> escape_iterate;  // set iff Escaped
  cplx last_point{};

  bool escaped() const { return verdict == OrbitVerdict::Escaped; }
};

/// Iterates z -> map(z).  Escaped at the first iterate n with |z_n| > escape_radius
/// (or a non-finite z_n); Bounded when max_iter applications never escape.
inline OrbitClassification classify_orbit(const GenericCubic& map, cplx z0,
                                          double escape_radius = kDefaultEscapeRadius,
                                          long max_iter = kDefaultMaxIter) {
  if (!(escape_radius >= 10.0)) throw invalid_input("escape radius must be at least 10");
  if (max_iter < 1) throw invalid_input("max_iter must be at least 1");
  const double r2 = escape_radius * escape_radius;
  cplx z = z0;
  for (long n = 0;; ++n) {
    if (!(std::norm(z) <= r2)) return {OrbitVerdict::Escaped, n, z};
    if (n == max_iter) return {OrbitVerdict::Bounded, std::nullopt, z};
    z = map(z);
  }
}

struct FixedPointData {
  cplx location{};
  cplx multiplier{};
  std::optional<cplx> index;  // 1/(1 - multiplier); empty when |multiplier - 1| <= kIndexDegeneracy
  int multiplicity = 1;

  bool multiple() const { return multiplicity > 1; }
};

inline std::optional<cplx> holomorphic_index(cplx multiplier) {
  if (std::abs(multiplier - 1.0) <= kIndexDegeneracy) return std::nullopt;
  return 1.0 / (1.0 - multiplier);
}

/// The three roots of p(z) = z, with multipliers p'(root) and indices.
/// Roots within kMultipleRootDistance of each other share a multiplicity count.
inline std::array<FixedPointData, 3> fixed_points(const GenericCubic& map) {
  const auto roots = solve_monic_cubic(map.A, map.B - 1.0, map.C);
  std::array<FixedPointData, 3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    out[i].location = roots[i];
    out[i].multiplier = map.derivative(roots[i]);
    out[i].index = holomorphic_index(out[i].multiplier);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    int m = 0;
    for (std::size_t j = 0; j < 3; ++j)
      if (std::abs(roots[i] - roots[j]) < kMultipleRootDistance) ++m;
    out[i].multiplicity = m;
  }
  return out;
}

/// (1/2 pi i) times the contour integral of dz/(z - p(z)) over the circle
/// |z - center| = radius, by the trapezoid rule with `nodes` equispaced nodes.
inline cplx contour_index(const GenericCubic& map, cplx center, double radius, int nodes = 1024) {
  if (nodes < 8) throw invalid_input("contour quadrature needs at least 8 nodes");
  if (!(radius > 0.0)) throw invalid_input("contour radius must be positive");
  cplx sum{};
  for (int k = 0; k < nodes; ++k) {
    const cplx offset = std::polar(radius, 2.0 * std::numbers::pi * k / nodes);
    sum += offset / -map.displacement(center + offset);
  }
  return sum / static_cast<double>(nodes);
}

/// Numerical companion of residue_index(): contour integral around the origin.
inline double residue_index_numeric(Per1Param p, int nodes = 1024, double radius = 1e-2) {
  if (p.a == 0.0) throw invalid_input("a = 0 is a double parabolic point; the index 1/a^2 is undefined");
  return contour_index(GenericCubic::per1(p), cplx{}, radius, nodes).real();
}

/// (c, v, shift) with p(z - shift) + shift = z^3 - 3c^2 z + 2c^3 + v.
struct MonicCentered {
  cplx c{};
  cplx v{};
  cplx shift{};
};

inline MonicCentered to_monic_centered(const GenericCubic& map) {
  const cplx s = -map.A / 3.0;  // translation killing the quadratic term
  const cplx linear = map.B - map.A * map.A / 3.0;
  const cplx constant = ((s + map.A) * s + map.B) * s + map.C - s;
  cplx c = std::sqrt(-linear / 3.0);
  if (c.imag() < 0.0 || (c.imag() == 0.0 && c.real() < 0.0)) c = -c;
  return {c, constant - 2.0 * c * c * c, -s};
}

inline GenericCubic from_monic_centered(const MonicCentered& m) {
  const cplx s = m.shift;
  const cplx c2 = m.c * m.c;
  return {3.0 * s, 3.0 * s * s - 3.0 * c2, ((s * s - 3.0 * c2) * s) + 2.0 * c2 * m.c + m.v - s};
}

}  // namespace plab
