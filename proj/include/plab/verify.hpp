#pragma once

// Numerical verification procedures for the parabolic-repelling interval:
// escape of real perturbations, the attracting-return threshold for the
// lifted phase, containment of the round cylinder, and the disk scan showing
// no Misiurewicz-like perturbations near f_{a(t)}.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "plab/config.hpp"
#include "plab/core_dynamics.hpp"
#include "plab/errors.hpp"
#include "plab/fatou.hpp"
#include "plab/perturbation.hpp"
#include "plab/scan.hpp"

namespace plab {

/// Modulus bound of the round annulus: pi / ln 3 - 1/2.
inline double round_modulus() { return std::numbers::pi / std::log(3.0) - 0.5; }

struct HeightInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t) const { return t > lo && t < hi; }
  bool nonempty() const { return lo < hi; }
};

/// (4 pi / 3 - m + 2 eps, m - 2 eps).
inline HeightInterval theorem_interval(double epsilon) {
  const double m = round_modulus();
  return {4.0 * std::numbers::pi / 3.0 - m + 2.0 * epsilon, m - 2.0 * epsilon};
}

/// Lower bound m/2 + t/2 - eps on |Im sigma| for non-escaping perturbations.
inline double phase_lower_bound(double t, double epsilon) { return 0.5 * round_modulus() + 0.5 * t - epsilon; }

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  bool fatal = true;
};

struct VerificationReport {
  VerificationReport() = default;
  explicit VerificationReport(std::string name) : title(std::move(name)) {}

  std::string title;
  std::vector<std::pair<std::string, std::string>> facts;
  std::vector<Check> checks;

  void fact(std::string key, std::string value) { facts.emplace_back(std::move(key), std::move(value)); }
  void fact(std::string key, double value) { facts.emplace_back(std::move(key), format_real(value)); }
  void check(std::string name, bool pass, std::string detail = {}, bool fatal = true) {
    checks.push_back({std::move(name), pass, std::move(detail), fatal});
  }

  bool passed() const {
    for (const auto& c : checks)
      if (c.fatal && !c.pass) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += (c.fatal && !c.pass);
    return n;
  }

  std::string text() const {
    std::ostringstream s;
    s << "report " << title << '\n';
    for (const auto& [k, v] : facts) s << k << '=' << v << '\n';
    for (const auto& c : checks) {
      s << (c.pass ? "PASS" : c.fatal ? "FAIL" : "WARN") << ' ' << c.name;
      if (!c.detail.empty()) s << ": " << c.detail;
      s << '\n';
    }
    s << "result=" << (passed() ? "PASS" : "FAIL") << '\n';
    return s.str();
  }
};

namespace detail {

inline std::string fmt(double x) { return format_real(x); }

inline std::string fmt(cplx z) { return format_real(z.real()) + (z.imag() < 0 ? "" : "+") + format_real(z.imag()) + "i"; }

inline ClassifyBudget budget_of(const RunConfig& cfg) { return {cfg.escape_radius, cfg.max_iter}; }

}  // namespace detail

// ---------------------------------------------------------------------------

struct RealEscapeOptions {
  std::vector<double> deltas{1e-4, 1e-5, 1e-6};
  int fit_points = 7;  // log-spaced over [fit_lo, fit_hi]
  double fit_lo = 1e-8;
  double fit_hi = 1e-5;
  double slope_tolerance = 0.05;
  double phase_bound = 0.05;
};

/// Real perturbations of f_{a(t)}: both critical orbits escape and both split
/// fixed points repel, with |lambda|^2 - 1 ~ 4 delta (a - 1/a).
inline VerificationReport verify_real_escape(double t, const RunConfig& cfg, const RealEscapeOptions& opt = {}) {
  cfg.validate();
  const double upper = round_modulus() - 2.0 * cfg.epsilon;
  if (!(t > 0.0 && t < upper)) throw invalid_input("t must lie in (0, m - 2 epsilon) = (0, " + detail::fmt(upper) + ")");
  VerificationReport r{"real-escape"};
  const Per1Param a = find_parameter_for_height(t, cfg.tol);
  r.fact("t", t);
  r.fact("a", a.a);
  r.fact("resit", a.resit());
  r.check("parabolic-repelling", a.a > 1.0 && a.a < std::numbers::sqrt3, "a = " + detail::fmt(a.a));

  const LiftedPhaseEstimator phase(a, PhaseOptions{}, cfg.tol);
  for (double d : opt.deltas) {
    const auto map = perturb(a, cplx{d, 0.0});
    const auto out = classify_perturbation(map, detail::budget_of(cfg));
    std::ostringstream s;
    s << "delta=" << detail::fmt(d) << " verdict=" << to_string(out.verdict);
    if (out.critical_plus.escaped()) s << " n+=" << *out.critical_plus.escape_iterate;
    if (out.critical_minus.escaped()) s << " n-=" << *out.critical_minus.escape_iterate;
    r.check("escape delta=" + detail::fmt(d), out.verdict == PerturbationVerdict::BothCriticalEscape, s.str());

    const auto split = split_fixed_points(map);
    const double lp = std::abs(split.plus.multiplier);
    const double lm = std::abs(split.minus.multiplier);
    r.check("repelling delta=" + detail::fmt(d), lp > 1.0 && lm > 1.0,
            "|lambda+|-1=" + detail::fmt(lp - 1.0) + " |lambda-|-1=" + detail::fmt(lm - 1.0));

    try {
      const auto e = phase.estimate(cplx{d, 0.0});
      r.check("horizontal transit delta=" + detail::fmt(d),
              std::abs(e.im_sigma) < opt.phase_bound && e.stability < opt.phase_bound,
              "im_sigma=" + detail::fmt(e.im_sigma) + " stability=" + detail::fmt(e.stability));
    } catch (const numerical_failure& f) {
      r.check("horizontal transit delta=" + detail::fmt(d), false, f.what());
    }
  }

  const double expected = 4.0 * (a.a - 1.0 / a.a);
  double sxy_p = 0.0, sxy_m = 0.0, sxx = 0.0;
  for (int k = 0; k < opt.fit_points; ++k) {
    const double d = opt.fit_lo * std::pow(opt.fit_hi / opt.fit_lo, k / double(opt.fit_points - 1));
    const auto split = split_fixed_points(perturb(a, cplx{d, 0.0}));
    sxy_p += d * (std::norm(split.plus.multiplier) - 1.0);
    sxy_m += d * (std::norm(split.minus.multiplier) - 1.0);
    sxx += d * d;
  }
  for (const auto& [label, slope] : {std::pair{"+", sxy_p / sxx}, std::pair{"-", sxy_m / sxx}}) {
    const double rel = std::abs(slope / expected - 1.0);
    r.check(std::string("multiplier slope ") + label, rel < opt.slope_tolerance,
            "fitted=" + detail::fmt(slope) + " expected=" + detail::fmt(expected) + " rel=" + detail::fmt(rel));
  }
  return r;
}

// ---------------------------------------------------------------------------

struct PhaseThresholdOptions {
  double modulus = 1e-5;
  int arguments = 16;  // at least 16
  double margin = 0.1;
  double real_phase_bound = 0.05;
};

struct FanSample {
  double argument = 0.0;
  bool estimated = false;
  PhaseEstimate estimate;
  std::string failure;
  bool attracting = false;  // some split fixed point has |lambda| < 1
};

/// Arguments of delta in (0, pi): most of them inside the transit band where
/// Im sigma ~ pi sin(theta/2) / sqrt(a |delta|) crosses pi resit, plus a few
/// wide ones where the orbit is captured.
inline std::vector<double> fan_arguments(Per1Param a, double modulus, int count) {
  const int wide = 4;
  const int band = count - wide;
  const double reach = std::max(3.0 * std::numbers::pi * a.resit(), 3.0);
  const double s = std::min(1.0, reach * std::sqrt(std::abs(a.a) * modulus) / std::numbers::pi);
  const double theta_max = 2.0 * std::asin(s);
  std::vector<double> out;
  for (int j = 1; j <= band; ++j) out.push_back(theta_max * j / band);
  for (double w : {0.125, 0.25, 0.5, 0.75}) out.push_back(w * std::numbers::pi);
  return out;
}

/// Im sigma beyond pi resit by the margin must coincide with an attracting
/// split fixed point; below by the margin, with none.
inline VerificationReport verify_phase_threshold(double t, const RunConfig& cfg, const PhaseThresholdOptions& opt = {},
                                         std::vector<FanSample>* samples = nullptr) {
  cfg.validate();
  if (opt.arguments < 16) throw invalid_input("the argument fan needs at least 16 arguments");
  if (!(opt.modulus > 0.0 && opt.modulus <= kEggbeaterBound)) throw invalid_input("|delta| must lie in (0, 1e-3]");
  VerificationReport r{"phase-threshold"};
  const Per1Param a = find_parameter_for_height(t, cfg.tol);
  const double threshold = std::numbers::pi * a.resit();
  r.fact("t", t);
  r.fact("a", a.a);
  r.fact("pi_resit", threshold);
  r.fact("modulus", opt.modulus);

  const LiftedPhaseEstimator phase(a, PhaseOptions{}, cfg.tol);
  try {
    const auto e = phase.estimate(cplx{opt.modulus, 0.0});
    r.check("real delta phase", std::abs(e.im_sigma) < opt.real_phase_bound && e.reliable,
            "im_sigma=" + detail::fmt(e.im_sigma) + " stability=" + detail::fmt(e.stability));
  } catch (const numerical_failure& f) {
    r.check("real delta phase", false, f.what());
  }

  std::vector<FanSample> fan;
  int above = 0, below = 0, reliable = 0;
  for (double theta : fan_arguments(a, opt.modulus, opt.arguments)) {
    FanSample s;
    s.argument = theta;
    const cplx delta = std::polar(opt.modulus, theta);
    const auto split = split_fixed_points(perturb(a, delta));
    s.attracting = std::abs(split.plus.multiplier) < 1.0 || std::abs(split.minus.multiplier) < 1.0;
    try {
      s.estimate = phase.estimate(delta);
      s.estimated = true;
    } catch (const numerical_failure& f) {
      s.failure = f.what();
    }
    const std::string where = "arg=" + detail::fmt(theta);
    if (s.estimated && s.estimate.reliable) {
      ++reliable;
      const double excess = std::abs(s.estimate.im_sigma) - threshold;
      const std::string detail = "im_sigma=" + detail::fmt(s.estimate.im_sigma) +
                                 " attracting=" + (s.attracting ? "yes" : "no");
      if (excess > opt.margin) {
        ++above;
        r.check("attracting above threshold " + where, s.attracting, detail);
      } else if (excess < -opt.margin) {
        ++below;
        r.check("repelling below threshold " + where, !s.attracting, detail);
      }
    }
    fan.push_back(std::move(s));
  }
  r.fact("fan_size", std::to_string(fan.size()));
  r.fact("reliable", std::to_string(reliable));
  r.fact("resolved_above", std::to_string(above));
  r.fact("resolved_below", std::to_string(below));
  if (samples) *samples = std::move(fan);
  return r;
}

// ---------------------------------------------------------------------------

struct CylinderOptions {
  std::vector<double> escape_heights{0.0, 0.5, -0.5, 1.0, -1.0, 1.17, -1.17};
  std::vector<double> bounded_heights{3.0, -3.0};
  std::vector<double> offsets{0.0, 0.25, 0.5, 0.75};
  long budget = 1'000'000;
};

/// Points of the repelling cylinder at moderate heights lie in the basin of
/// infinity; far heights return to the parabolic basin.
inline VerificationReport verify_cylinder(double t, const RunConfig& cfg, const CylinderOptions& opt = {}) {
  cfg.validate();
  VerificationReport r{"cylinder"};
  const Per1Param a = find_parameter_for_height(t, cfg.tol);
  const FatouCoordinates fatou(a);
  const GenericCubic f = GenericCubic::per1(a);
  r.fact("t", t);
  r.fact("a", a.a);
  r.fact("half_modulus", 0.5 * round_modulus());

  auto run = [&](double height, bool expect_escape) {
    for (double x : opt.offsets) {
      const cplx zeta{x, height};
      const std::string where = "zeta=" + detail::fmt(zeta);
      try {
        const cplx z = fatou.repelling_inverse(zeta);
        const auto o = classify_orbit(f, z, cfg.escape_radius, opt.budget);
        const std::string detail = o.escaped() ? "escaped at " + std::to_string(*o.escape_iterate) : "bounded";
        if (expect_escape)
          r.check("escapes " + where, o.escaped(), detail);
        else
          r.check("bounded " + where, !o.escaped(), detail, false);
      } catch (const numerical_failure& e) {
        r.check((expect_escape ? "escapes " : "bounded ") + where, false, e.what(), expect_escape);
      }
    }
  };
  for (double h : opt.escape_heights) run(h, true);
  for (double h : opt.bounded_heights) run(h, false);
  return r;
}

// ---------------------------------------------------------------------------

struct DiskVerification {
  VerificationReport report;
  DiskScan grid;
};

/// Disk scan around f_a: PASS iff no cell is Misiurewicz-like.  When `t` is
/// given the arithmetic gate and the phase lower bound are reported as well.
inline DiskVerification verify_disk(Per1Param a, double radius, int n, const RunConfig& cfg,
                                    std::optional<double> t = std::nullopt) {
  cfg.validate();
  ScanOptions opt;
  opt.budget = detail::budget_of(cfg);
  opt.jobs = cfg.jobs;
  opt.with_phase = true;
  opt.tol = cfg.tol;
  DiskVerification out{VerificationReport{t ? "theorem" : "disk"}, scan_delta_disk(a, radius, n, opt)};
  auto& r = out.report;
  if (t) r.fact("t", *t);
  r.fact("a", a.a);
  r.fact("radius", radius);
  r.fact("n", std::to_string(n));

  std::size_t counts[5] = {};
  std::size_t misiurewicz = 0;
  for (const auto& c : out.grid.cells) {
    ++counts[static_cast<int>(c.outcome.verdict)];
    if (c.outcome.misiurewicz_like) {
      ++misiurewicz;
      r.check("misiurewicz-like cell delta=" + detail::fmt(c.delta), false,
              "min|lambda|=" + detail::fmt(c.outcome.min_multiplier_modulus));
    }
  }
  for (auto v : {PerturbationVerdict::BothCriticalEscape, PerturbationVerdict::OneCriticalEscapes,
                 PerturbationVerdict::AttractingFixedPoint, PerturbationVerdict::ParabolicFixedPoint,
                 PerturbationVerdict::Undetermined})
    r.fact(std::string("count_") + to_string(v), std::to_string(counts[static_cast<int>(v)]));
  r.fact("count_misiurewicz_like", std::to_string(misiurewicz));
  r.check("no misiurewicz-like cells", misiurewicz == 0, std::to_string(misiurewicz) + " flagged");

  if (t) {
    const double bound = phase_lower_bound(*t, cfg.epsilon);
    const double two_thirds_pi = 2.0 * std::numbers::pi / 3.0;
    const double pr = std::numbers::pi * a.resit();
    r.fact("phase_lower_bound", bound);
    r.check("arithmetic gate", bound > two_thirds_pi && two_thirds_pi > pr,
            detail::fmt(bound) + " > " + detail::fmt(two_thirds_pi) + " > " + detail::fmt(pr));

    std::size_t estimated = 0, violations = 0;
    double smallest = INFINITY;
    for (const auto& c : out.grid.cells) {
      const bool bounded_side = !c.outcome.critical_plus.escaped() || !c.outcome.critical_minus.escaped();
      if (!bounded_side || !c.im_sigma) continue;
      ++estimated;
      smallest = std::min(smallest, std::abs(*c.im_sigma));
      if (std::abs(*c.im_sigma) < bound) ++violations;
    }
    r.fact("phase_estimates", std::to_string(estimated));
    if (estimated) r.fact("phase_min_abs", smallest);
    r.check("phase lower bound", violations == 0,
            std::to_string(violations) + " of " + std::to_string(estimated) + " estimates below", false);
  }
  return out;
}

inline DiskVerification verify_theorem_disk(double t, double radius, int n, const RunConfig& cfg) {
  cfg.validate();
  const auto iv = theorem_interval(cfg.epsilon);
  if (!iv.contains(t))
    throw invalid_input("t must lie in (" + detail::fmt(iv.lo) + ", " + detail::fmt(iv.hi) + ")");
  return verify_disk(find_parameter_for_height(t, cfg.tol), radius, n, cfg, t);
}

}  // namespace plab
