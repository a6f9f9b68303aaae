#pragma once

// Perturbations g_delta = f_a + delta out of the parabolic slice.
//
// For small delta the parabolic point splits into two simple fixed points
// (z^2 ~ -delta/a).  In the eggbeater regime orbits from the attracting petal
// pass between them (the gate) into the repelling petal; the transit acts as
// a translation by the lifted phase sigma in Fatou coordinates.  Only Im sigma
// is estimated: the unperturbed coordinates of f_a stand in for the
// persistent ones, and the iterate-count ambiguity only affects Re sigma.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "plab/core_dynamics.hpp"
#include "plab/errors.hpp"
#include "plab/fatou.hpp"

namespace plab {

inline constexpr double kEggbeaterBound = 1e-3;

struct PerturbedMap {
  Per1Param base;
  cplx delta{};

  GenericCubic cubic() const { return {cplx{base.a, 0.0}, cplx{1.0, 0.0}, delta}; }
};

inline PerturbedMap perturb(Per1Param a, cplx delta, double bound = kEggbeaterBound) {
  if (!std::isfinite(a.a)) throw invalid_input("parameter a must be finite");
  if (!(std::abs(delta) <= bound)) throw invalid_input("perturbation exceeds the eggbeater-regime bound");
  return {a, delta};
}

struct SplitFixedPoints {
  FixedPointData plus;   // larger imaginary part
  FixedPointData minus;
  FixedPointData far;    // the third fixed point, near -a
};

/// The two fixed points born from the parabolic point, ordered by Im.
inline SplitFixedPoints split_fixed_points(const PerturbedMap& map) {
  if (map.delta == cplx{}) throw invalid_input("delta = 0 has an unsplit parabolic point");
  const double scale = std::max(std::abs(map.base.a), 1e-300);
  const double radius = 3.0 * std::sqrt(std::abs(map.delta) / std::min(scale, 1.0));
  auto fps = fixed_points(map.cubic());
  std::sort(fps.begin(), fps.end(),
            [](const FixedPointData& l, const FixedPointData& r) { return std::abs(l.location) < std::abs(r.location); });
  if (!(std::abs(fps[1].location) < radius) || !(std::abs(fps[2].location) >= radius))
    throw invalid_input("split fixed points are not isolated near 0; delta is too large");
  SplitFixedPoints out{fps[0], fps[1], fps[2]};
  const auto above = [](cplx l, cplx r) { return l.imag() > r.imag() || (l.imag() == r.imag() && l.real() > r.real()); };
  if (above(out.minus.location, out.plus.location)) std::swap(out.plus, out.minus);
  return out;
}

/// |multiplier of the return map| predicted from Im sigma: exp(-2 pi (Im sigma - pi resit)).
inline double return_multiplier_modulus(Per1Param a, double im_sigma) {
  return std::exp(-2.0 * std::numbers::pi * (im_sigma - std::numbers::pi * a.resit()));
}

// ---------------------------------------------------------------------------
// Lifted phase

struct PhaseOptions {
  double gate_r1 = 0.03;  // repelling reference annulus r1 <= |z| <= r2, Re z > 0
  double gate_r2 = 0.3;
  double base_height = 5.0;  // psi_att of the real base point
  long max_transit = 10'000'000;
  int max_samples = 16;
  double stability_threshold = 0.05;
  double escape_radius = kDefaultEscapeRadius;
  double capture_winding = 3.0 * std::numbers::pi;
};

enum class PhaseFailure { NoTransit, Captured, Budget };

class phase_failure : public numerical_failure {
 public:
  phase_failure(PhaseFailure kind, const std::string& what, long iterations, cplx last)
      : numerical_failure(what, last), kind_(kind), iterations_(iterations) {}
  PhaseFailure kind() const noexcept { return kind_; }
  long iterations() const noexcept { return iterations_; }

 private:
  PhaseFailure kind_;
  long iterations_;
};

struct PhaseSample {
  long iterate = 0;
  cplx point{};
  cplx coordinate{};  // psi_rep of f_a at point
};

struct PhaseEstimate {
  double im_sigma = 0.0;
  long transit_length = 0;  // iterate of the first sample
  std::vector<PhaseSample> samples;
  double stability = 0.0;   // max - min of the per-sample estimates
  bool reliable = false;
};

class LiftedPhaseEstimator {
 public:
  explicit LiftedPhaseEstimator(Per1Param base, PhaseOptions options = {}, double tol = kDefaultTol)
      : fatou_(base), options_(options), tol_(tol) {
    base_point_ = locate_base_point();
    base_value_ = fatou_.attracting(base_point_, tol_).value;
  }

  Per1Param base() const { return fatou_.param(); }
  cplx base_point() const { return base_point_; }
  cplx base_value() const { return base_value_; }
  const FatouCoordinates& fatou() const { return fatou_; }
  const PhaseOptions& options() const { return options_; }

  PhaseEstimate estimate(cplx delta) const {
    const PerturbedMap map = perturb(fatou_.param(), delta);
    const auto split = split_fixed_points(map);
    const GenericCubic g = map.cubic();
    const std::array<cplx, 2> centers{split.plus.location, split.minus.location};
    const std::array<bool, 2> attracting{std::abs(split.plus.multiplier) < 1.0,
                                         std::abs(split.minus.multiplier) < 1.0};
    const double gap = std::abs(centers[0] - centers[1]);
    const double r2 = options_.escape_radius * options_.escape_radius;

    std::array<double, 2> winding{0.0, 0.0};
    std::array<double, 2> angle{std::arg(base_point_ - centers[0]), std::arg(base_point_ - centers[1])};

    PhaseEstimate out;
    cplx z = base_point_;
    for (long n = 1; n <= options_.max_transit; ++n) {
      z = g(z);
      if (!(std::norm(z) <= r2)) {
        if (out.samples.empty())
          throw phase_failure(PhaseFailure::NoTransit, "no transit: orbit escaped before the gate", n, z);
        break;
      }
      const bool in_annulus = z.real() > 0.0 && std::abs(z) >= options_.gate_r1 && std::abs(z) <= options_.gate_r2;
      if (out.samples.empty()) {
        for (int k = 0; k < 2; ++k) {
          const double next = std::arg(z - centers[k]);
          double step = next - angle[k];
          if (step > std::numbers::pi) step -= 2.0 * std::numbers::pi;
          if (step < -std::numbers::pi) step += 2.0 * std::numbers::pi;
          winding[k] += step;
          angle[k] = next;
          const bool circling = std::abs(winding[k]) > options_.capture_winding;
          const bool converged = attracting[k] && std::abs(z - centers[k]) < 1e-3 * gap;
          if (circling || converged)
            throw phase_failure(PhaseFailure::Captured, "captured by a fixed point before transit", n, z);
        }
      }
      if (in_annulus) {
        out.samples.push_back({n, z, fatou_.repelling(z, tol_).value});
        if (static_cast<int>(out.samples.size()) == options_.max_samples) break;
      } else if (!out.samples.empty()) {
        break;
      }
    }
    if (out.samples.empty())
      throw phase_failure(PhaseFailure::Budget, "transit budget exhausted", options_.max_transit, z);

    double lo = INFINITY;
    double hi = -INFINITY;
    double sum = 0.0;
    for (const auto& s : out.samples) {
      const double v = s.coordinate.imag() - base_value_.imag();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    out.im_sigma = sum / static_cast<double>(out.samples.size());
    out.transit_length = out.samples.front().iterate;
    out.stability = hi - lo;
    out.reliable = out.samples.size() >= 2 && out.stability < options_.stability_threshold;
    return out;
  }

 private:
  // Real point of the attracting petal with psi_att = base_height.  psi_att is
  // real and increasing on (-a, 0), where f_a(x) - x = x^2 (a + x) > 0.
  cplx locate_base_point() const {
    const double a = fatou_.param().a;
    const double target = options_.base_height;
    auto value = [&](double x) { return fatou_.attracting(cplx{x, 0.0}, tol_).value.real(); };
    double hi = -1e-3 * std::min(a, 1.0);
    double lo = -0.5 * a;
    for (int k = 0; k < 60 && !(value(lo) < target); ++k) lo = 0.5 * (lo - a);
    if (!(value(lo) < target) || !(value(hi) > target))
      throw numerical_failure("cannot bracket the phase base point on the real axis");
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::abs(lo); ++it) {
      const double mid = 0.5 * (lo + hi);
      (value(mid) < target ? lo : hi) = mid;
    }
    return cplx{0.5 * (lo + hi), 0.0};
  }

  FatouCoordinates fatou_;
  PhaseOptions options_;
  double tol_;
  cplx base_point_{};
  cplx base_value_{};
};

inline PhaseEstimate estimate_lifted_phase_im(const PerturbedMap& map, double tol = kDefaultTol,
                                              PhaseOptions options = {}) {
  return LiftedPhaseEstimator(map.base, options, tol).estimate(map.delta);
}

// ---------------------------------------------------------------------------
// Classification

enum class PerturbationVerdict {
  BothCriticalEscape,
  OneCriticalEscapes,
  AttractingFixedPoint,
  ParabolicFixedPoint,
  Undetermined
};

inline const char* to_string(PerturbationVerdict v) {
  switch (v) {
    case PerturbationVerdict::BothCriticalEscape: return "BothCriticalEscape";
    case PerturbationVerdict::OneCriticalEscapes: return "OneCriticalEscapes";
    case PerturbationVerdict::AttractingFixedPoint: return "AttractingFixedPoint";
    case PerturbationVerdict::ParabolicFixedPoint: return "ParabolicFixedPoint";
    case PerturbationVerdict::Undetermined: return "Undetermined";
  }
  return "?";
}

struct ClassifyBudget {
  double escape_radius = kDefaultEscapeRadius;
  long max_iter = kDefaultMaxIter;
};

struct Margins {
  double attracting = 1e-6;   // |lambda| < 1 - this
  double parabolic = 1e-4;    // ||lambda| - 1| < this
  double misiurewicz = 1e-3;  // repelling means |lambda| > 1 + this
};

struct PerturbationOutcome {
  PerturbationVerdict verdict = PerturbationVerdict::Undetermined;
  OrbitClassification critical_plus;
  OrbitClassification critical_minus;
  std::array<FixedPointData, 3> fixed_points{};
  std::optional<std::size_t> witness;  // attracting or parabolic fixed point, index into fixed_points
  double min_multiplier_modulus = 0.0;
  /// Both critical orbits bounded while every fixed point is repelling by the
  /// Misiurewicz margin: the configuration excluded near the interval.
  bool misiurewicz_like = false;
};

inline PerturbationOutcome classify_perturbation(const GenericCubic& map, ClassifyBudget budget = {},
                                                 Margins margins = {}) {
  PerturbationOutcome out;
  const auto crit = critical_points(map);
  out.critical_plus = classify_orbit(map, crit.plus, budget.escape_radius, budget.max_iter);
  out.critical_minus = classify_orbit(map, crit.minus, budget.escape_radius, budget.max_iter);
  out.fixed_points = fixed_points(map);

  std::optional<std::size_t> attracting;
  std::optional<std::size_t> parabolic;
  bool all_repelling = true;
  out.min_multiplier_modulus = INFINITY;
  for (std::size_t i = 0; i < 3; ++i) {
    const double mod = std::abs(out.fixed_points[i].multiplier);
    out.min_multiplier_modulus = std::min(out.min_multiplier_modulus, mod);
    if (mod < 1.0 - margins.attracting && (!attracting || mod < std::abs(out.fixed_points[*attracting].multiplier)))
      attracting = i;
    if (std::abs(mod - 1.0) < margins.parabolic && !parabolic) parabolic = i;
    if (!(mod > 1.0 + margins.misiurewicz)) all_repelling = false;
  }

  const bool plus_esc = out.critical_plus.escaped();
  const bool minus_esc = out.critical_minus.escaped();
  out.misiurewicz_like = !plus_esc && !minus_esc && all_repelling;
  if (plus_esc && minus_esc) {
    out.verdict = PerturbationVerdict::BothCriticalEscape;
  } else if (attracting) {
    out.verdict = PerturbationVerdict::AttractingFixedPoint;
    out.witness = attracting;
  } else if (parabolic) {
    out.verdict = PerturbationVerdict::ParabolicFixedPoint;
    out.witness = parabolic;
  } else if (plus_esc || minus_esc) {
    out.verdict = PerturbationVerdict::OneCriticalEscapes;
  } else {
    out.verdict = PerturbationVerdict::Undetermined;
  }
  return out;
}

inline PerturbationOutcome classify_perturbation(const PerturbedMap& map, ClassifyBudget budget = {},
                                                 Margins margins = {}) {
  return classify_perturbation(map.cubic(), budget, margins);
}

}  // namespace plab
