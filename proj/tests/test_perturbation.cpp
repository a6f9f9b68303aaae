#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "plab/perturbation.hpp"

using namespace plab;

namespace {

const Per1Param& a_of(double t) {
  static std::map<double, Per1Param> cache;
  auto it = cache.find(t);
  if (it == cache.end()) it = cache.emplace(t, find_parameter_for_height(t)).first;
  return it->second;
}

bool near_any(const std::array<FixedPointData, 3>& fps, cplx z, double tol) {
  return std::any_of(fps.begin(), fps.end(), [&](const auto& fp) { return std::abs(fp.location - z) < tol; });
}

}  // namespace

TEST_CASE("perturb builds (a, 1, delta)") {
  const auto m = perturb(Per1Param{1.3}, cplx{0.0, 0.0});
  const auto g = m.cubic();
  const auto f = GenericCubic::per1(Per1Param{1.3});
  CHECK(g.A == f.A);
  CHECK(g.B == f.B);
  CHECK(g.C == f.C);
  CHECK(perturb(Per1Param{1.0}, cplx{1e-6, 0.0}).cubic().real_coefficients());
  CHECK_THROWS_AS(perturb(Per1Param{1.0}, cplx{2e-3, 0.0}), invalid_input);
  CHECK_THROWS_AS(perturb(Per1Param{INFINITY}, cplx{1e-6, 0.0}), invalid_input);
}

TEST_CASE("real perturbations commute with conjugation") {
  const auto g = perturb(Per1Param{1.2}, cplx{3e-5, 0.0}).cubic();
  for (const cplx z : {cplx{0.1, 0.2}, cplx{-0.4, 0.05}}) CHECK(g(std::conj(z)) == std::conj(g(z)));
}

TEST_CASE("fixed points of z^3 + z^2 + 1e-6 match the oracle") {
  const auto fps = fixed_points(perturb(Per1Param{1.0}, cplx{1e-6, 0.0}).cubic());
  CHECK(near_any(fps, cplx{-1.000000999998000007, 0.0}, 1e-15));
  CHECK(near_any(fps, cplx{4.99999000003499985e-7, 0.00099999937500180468038}, 1e-15));
  CHECK(near_any(fps, cplx{4.99999000003499985e-7, -0.00099999937500180468038}, 1e-15));
  // backward error: residual within a few ulps of the largest term
  for (const auto& fp : fps) {
    const double scale = std::pow(std::abs(fp.location), 2) * (std::abs(fp.location) + 1.0) + 1e-6;
    CHECK(std::abs(fp.location * fp.location * (fp.location + 1.0) + 1e-6) < 4.0 * 2.2205e-16 * scale);
  }
}

TEST_CASE("split fixed points at a = 1.3, delta = 1e-6 match the oracle") {
  const auto s = split_fixed_points(perturb(Per1Param{1.3}, cplx{1e-6, 0.0}));
  CHECK(std::abs(s.plus.location - cplx{2.9585771883703519279e-7, 0.00087705776980291377362}) < 1e-16);
  CHECK(std::abs(s.minus.location - cplx{2.9585771883703519279e-7, -0.00087705776980291377362}) < 1e-16);
  CHECK(std::abs(s.far.location - -1.3000005917154376741) < 1e-15);
  CHECK(std::abs(std::norm(s.plus.multiplier) - 1.0000021230851825826) < 1e-14);
  CHECK(std::abs(std::norm(s.minus.multiplier) - 1.0000021230851825826) < 1e-14);
  // first-order expansion 1 + 4 delta (a - 1/a)
  CHECK(std::abs(std::norm(s.plus.multiplier) - 1.0 - 4e-6 * (1.3 - 1.0 / 1.3)) < 1e-10);
}

TEST_CASE("multipliers on the parabolic-attracting side") {
  const auto s = split_fixed_points(perturb(Per1Param{0.5}, cplx{1e-6, 0.0}));
  CHECK(std::abs(s.plus.multiplier) < 1.0);
  CHECK(std::abs(s.minus.multiplier) < 1.0);
}

TEST_CASE("split points are ordered by imaginary part and exclude the far root") {
  for (double theta : {0.3, 1.0, 2.5, -1.2}) {
    const auto s = split_fixed_points(perturb(Per1Param{1.2}, std::polar(1e-5, theta)));
    CHECK(s.plus.location.imag() >= s.minus.location.imag());
    CHECK(std::abs(s.far.location + 1.2) < 1e-4);
    for (const auto* fp : {&s.plus, &s.minus}) {
      const cplx z = fp->location;
      CHECK(std::abs(fp->multiplier - (1.0 + 2.0 * 1.2 * z + 3.0 * z * z)) < 1e-15);
    }
  }
}

TEST_CASE("split fixed points reject unsplit or unresolved configurations") {
  CHECK_THROWS_AS(split_fixed_points(perturb(Per1Param{1.0}, cplx{})), invalid_input);
  CHECK_THROWS_AS(split_fixed_points(perturb(Per1Param{0.01}, cplx{1e-3, 0.0})), invalid_input);
}

TEST_CASE("index sum of the split points tends to 1/a^2") {
  for (double a : {1.2, 1.5, 0.7}) {
    double prev = INFINITY;
    for (double d : {1e-4, 1e-5, 1e-6, 1e-7}) {
      const auto s = split_fixed_points(perturb(Per1Param{a}, cplx{d, 0.0}));
      const double err = std::abs(*s.plus.index + *s.minus.index - 1.0 / (a * a));
      CAPTURE(a, d, err);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("return multiplier modulus") {
  const Per1Param a{1.3};
  CHECK(std::abs(return_multiplier_modulus(a, std::numbers::pi * a.resit()) - 1.0) < 1e-15);
  CHECK(std::abs(return_multiplier_modulus(Per1Param{1.0}, 1.0) - 0.0018674427317079893) < 1e-15);
  CHECK(return_multiplier_modulus(a, std::numbers::pi * a.resit() + 0.1) < 1.0);
  CHECK(return_multiplier_modulus(a, std::numbers::pi * a.resit() - 0.1) > 1.0);
}

TEST_CASE("real delta gives a horizontal transit") {
  for (double t : {1.9, 2.0, 2.2}) {
    const LiftedPhaseEstimator est(a_of(t));
    CHECK(std::abs(est.base_value() - 5.0) < 1e-9);
    CHECK(est.base_point().imag() == 0.0);
    for (double d : {1e-4, 1e-5, 1e-6}) {
      const auto e = est.estimate(cplx{d, 0.0});
      CAPTURE(t, d);
      CHECK(std::abs(e.im_sigma) < 0.05);
      CHECK(e.stability < 0.05);
      CHECK(e.reliable);
      CHECK(e.samples.size() >= 2);
      for (const auto& s : e.samples) {
        CHECK(s.point.real() > 0.0);
        CHECK(std::abs(s.point) >= 0.03);
        CHECK(std::abs(s.point) <= 0.3);
      }
    }
  }
}

TEST_CASE("phase is odd under conjugation of delta") {
  const LiftedPhaseEstimator est(a_of(2.0));
  for (double theta : {0.0005, 0.001, 0.003}) {
    const cplx d = std::polar(1e-5, theta);
    const auto up = est.estimate(d);
    const auto down = est.estimate(std::conj(d));
    CHECK(std::abs(up.im_sigma + down.im_sigma) < std::max(up.stability, 1e-12));
    CHECK(up.im_sigma > 0.0);
  }
}

TEST_CASE("phase beyond pi resit coincides with an attracting split point") {
  const Per1Param a = a_of(2.0);
  const LiftedPhaseEstimator est(a);
  const double threshold = std::numbers::pi * a.resit();
  int checked = 0;
  for (int k = 1; k <= 24; ++k) {
    const cplx d = std::polar(1e-5, 0.0004 * k);
    PhaseEstimate e;
    try {
      e = est.estimate(d);
    } catch (const phase_failure&) {
      continue;
    }
    if (!e.reliable || std::abs(e.im_sigma - threshold) < 0.1) continue;
    const auto s = split_fixed_points(perturb(a, d));
    const bool attracting = std::min(std::abs(s.plus.multiplier), std::abs(s.minus.multiplier)) < 1.0;
    CAPTURE(k, e.im_sigma);
    CHECK(attracting == (e.im_sigma > threshold));
    CHECK((return_multiplier_modulus(a, e.im_sigma) < 1.0) == attracting);
    ++checked;
  }
  CHECK(checked >= 12);
}

TEST_CASE("phase is stable under refinement along delta = pi^2 / (a (N + i kappa)^2)") {
  // Along this family the transit translation tends to N + i(-kappa).
  for (double t : {1.9, 2.0}) {
    const Per1Param a = a_of(t);
    const LiftedPhaseEstimator est(a);
    for (double kappa : {0.1, 0.2}) {
      double prev_err = INFINITY;
      double prev = NAN;
      for (double n : {200.0, 400.0, 800.0, 1600.0}) {
        const cplx q{n, kappa};
        const cplx d = std::numbers::pi * std::numbers::pi / (a.a * q * q);
        const auto e = est.estimate(d);
        CAPTURE(t, kappa, n, e.im_sigma);
        CHECK(e.reliable);
        if (!std::isnan(prev)) CHECK(std::abs(e.im_sigma - prev) < 0.1);
        const double err = std::abs(e.im_sigma + kappa);
        CHECK(err < prev_err);
        prev_err = err;
        prev = e.im_sigma;
      }
      CHECK(prev_err < 1e-3);
    }
  }
}

TEST_CASE("orbits circling a split point are reported as captured") {
  const LiftedPhaseEstimator est(a_of(2.0));
  for (double theta : {0.5, 1.5, 3.1}) {
    try {
      est.estimate(std::polar(1e-5, theta));
      FAIL("expected capture");
    } catch (const phase_failure& f) {
      CHECK(f.kind() == PhaseFailure::Captured);
      CHECK(f.iterations() > 0);
    }
  }
}

TEST_CASE("tiny transit budget is reported, not fabricated") {
  PhaseOptions opt;
  opt.max_transit = 10;
  const LiftedPhaseEstimator est(a_of(2.0), opt);
  try {
    est.estimate(cplx{1e-6, 0.0});
    FAIL("expected budget failure");
  } catch (const phase_failure& f) {
    CHECK(f.kind() == PhaseFailure::Budget);
  }
}

TEST_CASE("classification verdicts") {
  SECTION("real perturbation of a(2.0) lies in the shift locus") {
    const auto o = classify_perturbation(perturb(a_of(2.0), cplx{1e-5, 0.0}));
    CHECK(o.verdict == PerturbationVerdict::BothCriticalEscape);
    CHECK(o.critical_plus.escaped());
    CHECK(o.critical_minus.escaped());
    CHECK_FALSE(o.misiurewicz_like);
  }
  SECTION("delta = 0 is parabolic") {
    const auto o = classify_perturbation(perturb(Per1Param{1.3}, cplx{}));
    CHECK(o.verdict == PerturbationVerdict::ParabolicFixedPoint);
    REQUIRE(o.witness);
    CHECK(std::abs(o.fixed_points[*o.witness].multiplier - 1.0) < 1e-7);
  }
  SECTION("a = 0.5 keeps a non-repelling fixed point") {
    for (const cplx d : {cplx{1e-6, 0.0}, cplx{-1e-5, 2e-5}, cplx{0.0, -1e-4}, cplx{3e-4, 3e-4}}) {
      const auto o = classify_perturbation(perturb(Per1Param{0.5}, d));
      CAPTURE(d);
      CHECK((o.verdict == PerturbationVerdict::AttractingFixedPoint ||
             o.verdict == PerturbationVerdict::ParabolicFixedPoint));
      CHECK(o.min_multiplier_modulus < 1.0 + 1e-4);
    }
  }
  SECTION("off-axis perturbation of a(2.0) is captured by an attracting point") {
    const auto o = classify_perturbation(perturb(a_of(2.0), std::polar(1e-5, 0.5)));
    CHECK(o.verdict == PerturbationVerdict::AttractingFixedPoint);
    REQUIRE(o.witness);
    CHECK(std::abs(o.fixed_points[*o.witness].multiplier) < 1.0 - 1e-6);
  }
  SECTION("a far cubic with escaping critical points") {
    const GenericCubic p{cplx{3.0, 0.0}, cplx{1.0, 0.0}, cplx{2.0, 0.0}};
    const auto o = classify_perturbation(p);
    CHECK((o.verdict == PerturbationVerdict::BothCriticalEscape ||
           o.verdict == PerturbationVerdict::OneCriticalEscapes));
  }
  SECTION("misiurewicz-like flag needs bounded critical orbits and repelling fixed points") {
    // z^3: superattracting fixed point at 0
    const auto o = classify_perturbation(GenericCubic{cplx{}, cplx{}, cplx{}});
    CHECK(o.verdict == PerturbationVerdict::AttractingFixedPoint);
    CHECK_FALSE(o.misiurewicz_like);
    // z^3 - 3z: critical points +-1 land on the fixed points -+2; fixed multipliers -3, 9, 9
    const auto m = classify_perturbation(GenericCubic{cplx{}, cplx{-3.0, 0.0}, cplx{}});
    CHECK(m.verdict == PerturbationVerdict::Undetermined);
    CHECK(m.misiurewicz_like);
  }
}

TEST_CASE("verdict names") {
  CHECK(std::string(to_string(PerturbationVerdict::BothCriticalEscape)) == "BothCriticalEscape");
  CHECK(std::string(to_string(PerturbationVerdict::Undetermined)) == "Undetermined");
}
