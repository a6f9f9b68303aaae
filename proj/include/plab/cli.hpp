#pragma once

// Command-line front end.  Exit codes: 0 success or PASS, 1 verification
// FAIL, 2 invalid input, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "plab/config.hpp"
#include "plab/core_dynamics.hpp"
#include "plab/errors.hpp"
#include "plab/fatou.hpp"
#include "plab/perturbation.hpp"
#include "plab/scan.hpp"
#include "plab/verify.hpp"

namespace plab::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kInvalid = 2, kNumerical = 3 };

namespace detail {

struct Printer {
  std::ostream& out;

  void kv(const std::string& k, double v) const { out << k << '=' << format_real(v) << '\n'; }
  void kv(const std::string& k, long v) const { out << k << '=' << v << '\n'; }
  void kv(const std::string& k, const std::string& v) const { out << k << '=' << v << '\n'; }
  void kv(const std::string& k, const char* v) const { out << k << '=' << v << '\n'; }
  void kv(const std::string& k, bool v) const { out << k << '=' << (v ? "true" : "false") << '\n'; }
  void kv(const std::string& k, cplx z) const {
    kv(k + "_re", z.real());
    kv(k + "_im", z.imag());
  }
  void orbit(const std::string& k, const OrbitClassification& o) const {
    kv(k, o.escaped() ? "Escaped" : "Bounded");
    if (o.escape_iterate) kv(k + "_escape_iter", *o.escape_iterate);
  }
};

/// Config flags shared by every subcommand; the option handles record which were given.
struct ConfigFlags {
  RunConfig values;
  std::string config_path;
  CLI::Option* epsilon = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* escape_radius = nullptr;
  CLI::Option* max_iter = nullptr;
  CLI::Option* output_dir = nullptr;
  CLI::Option* jobs = nullptr;
  CLI::Option* config = nullptr;

  void attach(CLI::App& app) {
    epsilon = app.add_option("--epsilon", values.epsilon, "slack epsilon, 0 < eps < 0.01");
    tol = app.add_option("--tol", values.tol, "numerical tolerance in [1e-12, 1e-3]");
    escape_radius = app.add_option("--escape-radius", values.escape_radius, "escape radius (>= 10)");
    max_iter = app.add_option("--max-iter", values.max_iter, "orbit iteration budget");
    output_dir = app.add_option("--output-dir", values.output_dir, "directory for relative output paths");
    jobs = app.add_option("--jobs", values.jobs, "worker threads for scans");
    config = app.add_option("--config", config_path, "key=value config file (else $PLAB_CONFIG)");
  }

  /// Defaults, then the config file, then explicit flags.
  RunConfig resolve(std::string& source) const {
    RunConfig cfg;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar)) path = env;
    }
    if (!path.empty()) apply_config_file(cfg, path);
    source = path;
    if (epsilon->count()) cfg.epsilon = values.epsilon;
    if (tol->count()) cfg.tol = values.tol;
    if (escape_radius->count()) cfg.escape_radius = values.escape_radius;
    if (max_iter->count()) cfg.max_iter = values.max_iter;
    if (output_dir->count()) cfg.output_dir = values.output_dir;
    if (jobs->count()) cfg.jobs = values.jobs;
    cfg.validate();
    return cfg;
  }
};

inline std::filesystem::path output_path(const RunConfig& cfg, const std::string& given) {
  std::filesystem::path p(given);
  if (p.is_relative()) p = std::filesystem::path(cfg.output_dir) / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p;
}

/// Writes <stem>.csv and <stem>.ppm; returns both paths.
template <class Grid>
std::pair<std::string, std::string> save_grid(const RunConfig& cfg, const std::string& given, const Grid& grid) {
  auto base = output_path(cfg, given);
  auto csv = base;
  auto ppm = base;
  csv.replace_extension(".csv");
  ppm.replace_extension(".ppm");
  save_csv(csv.string(), grid);
  save_ppm(ppm.string(), grid);
  return {csv.string(), ppm.string()};
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parabolic perturbation laboratory for the cubic slice f_a(z) = z + a z^2 + z^3", "plab"};
  app.require_subcommand(1);
  app.fallthrough();
  detail::ConfigFlags flags;
  flags.attach(app);

  double a = 0.0, t = 0.0, height = 3.0, dre = 0.0, dim = 0.0, radius = 1e-4;
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0, modulus = 1e-5;
  int n = 64, arguments = 16, samples = 4;
  std::string out_path;
  bool with_phase = false;

  auto* height_cmd = app.add_subcommand("height", "critical Ecalle height h_a");
  height_cmd->add_option("--a", a, "parameter a in (0, sqrt 3)")->required();

  auto* find_cmd = app.add_subcommand("find-a", "parameter a with critical height T");
  find_cmd->add_option("--height", t, "target height T > 0")->required();

  auto* residue_cmd = app.add_subcommand("residue", "fixed-point index 1/a^2 and resit");
  residue_cmd->add_option("--a", a, "parameter a != 0")->required();

  auto* horn_cmd = app.add_subcommand("horn", "horn-map multiplier and offset diagnostic");
  horn_cmd->add_option("--a", a, "parameter a in (0, sqrt 3)")->required();
  horn_cmd->add_option("--height", height, "cylinder height of the diagnostic")->capture_default_str();
  horn_cmd->add_option("--samples", samples, "samples per end")->capture_default_str();

  auto* phase_cmd = app.add_subcommand("phase", "Im of the lifted phase for g = f_a + delta");
  auto* classify_cmd = app.add_subcommand("classify", "classify g = f_a + delta");
  for (auto* c : {phase_cmd, classify_cmd}) {
    c->add_option("--a", a, "parameter a")->required();
    c->add_option("--delta-re", dre, "Re delta")->required();
    c->add_option("--delta-im", dim, "Im delta")->capture_default_str();
  }

  auto* scan_delta_cmd = app.add_subcommand("scan-delta", "classify perturbations over a delta square");
  scan_delta_cmd->add_option("--a", a, "parameter a")->required();
  scan_delta_cmd->add_option("--radius", radius, "half-width of the delta square")->required();
  scan_delta_cmd->add_option("--n", n, "cells per side")->required();
  scan_delta_cmd->add_option("--out", out_path, "output stem; writes .csv and .ppm")->required();
  scan_delta_cmd->add_flag("--phase", with_phase, "estimate Im sigma on non-escaping cells");

  auto* scan_slice_cmd = app.add_subcommand("scan-slice", "critical-orbit scan over complex a");
  scan_slice_cmd->add_option("--re-min", re_min)->required();
  scan_slice_cmd->add_option("--re-max", re_max)->required();
  scan_slice_cmd->add_option("--im-min", im_min)->required();
  scan_slice_cmd->add_option("--im-max", im_max)->required();
  scan_slice_cmd->add_option("--n", n, "cells per side")->required();
  scan_slice_cmd->add_option("--out", out_path, "output stem; writes .csv and .ppm")->required();

  auto* verify_cmd = app.add_subcommand("verify", "verification procedures");
  verify_cmd->require_subcommand(1);
  verify_cmd->fallthrough();
  auto* v41 = verify_cmd->add_subcommand("lemma41", "real perturbations escape, split points repel");
  auto* v42 = verify_cmd->add_subcommand("lemma42", "phase threshold against the exact multipliers");
  auto* vcyl = verify_cmd->add_subcommand("cylinder", "round-cylinder containment");
  auto* vthm = verify_cmd->add_subcommand("theorem", "no Misiurewicz-like perturbations in a delta disk");
  for (auto* c : {v41, v42, vcyl}) c->add_option("--t", t, "critical height")->required();
  v42->add_option("--modulus", modulus, "|delta| of the fan")->capture_default_str();
  v42->add_option("--arguments", arguments, "fan size (>= 16)")->capture_default_str();
  auto* t_opt = vthm->add_option("--t", t, "critical height inside the admissible height interval");
  auto* a_opt = vthm->add_option("--a", a, "run the disk check at this a instead of a(t)");
  t_opt->excludes(a_opt);
  vthm->add_option("--radius", radius, "half-width of the delta square")->capture_default_str();
  vthm->add_option("--n", n, "cells per side")->capture_default_str();
  vthm->add_option("--out", out_path, "output stem; writes .csv and .ppm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kInvalid;
  }

  const detail::Printer p{out};
  try {
    std::string source;
    const RunConfig cfg = flags.resolve(source);
    std::string command;
    for (const auto* s : app.get_subcommands()) {
      command = s->get_name();
      for (const auto* s2 : s->get_subcommands()) command += " " + s2->get_name();
    }
    out << "# command=" << command << '\n';
    if (!source.empty()) out << "# config_file=" << source << '\n';
    for (const auto& [k, v] : describe(cfg)) out << "# " << k << '=' << v << '\n';
    const ClassifyBudget budget{cfg.escape_radius, cfg.max_iter};

    if (*height_cmd) {
      const Per1Param pa{a};
      const auto h = critical_ecalle_height(pa, cfg.tol);
      const auto crit = critical_points(pa);
      p.kv("a", a);
      p.kv("h", h.h);
      p.kv("critical_plus", crit.plus);
      p.kv("critical_minus", crit.minus);
      p.kv("psi_att_plus", h.plus.value);
      p.kv("psi_att_minus", h.minus.value);
    } else if (*find_cmd) {
      const Per1Param pa = find_parameter_for_height(t, cfg.tol);
      p.kv("height", t);
      p.kv("a", pa.a);
      p.kv("h", critical_ecalle_height(pa, cfg.tol).h);
      p.kv("resit", pa.resit());
    } else if (*residue_cmd) {
      const Per1Param pa{a};
      p.kv("a", a);
      p.kv("iota", residue_index(pa));
      p.kv("resit", resit(pa));
      p.kv("iota_contour", residue_index_numeric(pa));
    } else if (*horn_cmd) {
      const Per1Param pa{a};
      const auto d = horn_offset_diagnostic(pa, height, samples, cfg.tol);
      p.kv("a", a);
      p.kv("resit", pa.resit());
      p.kv("horn_multiplier", d.multiplier);
      p.kv("expected_im_offset", d.expected_im_offset);
      p.kv("diagnostic_height", d.height);
      p.kv("upper_mean_offset", d.upper_mean);
      p.kv("lower_mean_offset", d.lower_mean);
      p.kv("drift", d.drift);
      p.kv("oscillation", d.oscillation);
    } else if (*phase_cmd) {
      const Per1Param pa{a};
      require_interval(pa);
      const cplx delta{dre, dim};
      const auto split = split_fixed_points(perturb(pa, delta));
      const LiftedPhaseEstimator est(pa, PhaseOptions{}, cfg.tol);
      const auto e = est.estimate(delta);
      p.kv("a", a);
      p.kv("delta", delta);
      p.kv("base_point", est.base_point());
      p.kv("im_sigma", e.im_sigma);
      p.kv("stability", e.stability);
      p.kv("reliable", e.reliable);
      p.kv("transit_length", e.transit_length);
      p.kv("samples", static_cast<long>(e.samples.size()));
      p.kv("pi_resit", std::numbers::pi * pa.resit());
      p.kv("return_multiplier_modulus", return_multiplier_modulus(pa, e.im_sigma));
      p.kv("split_plus_multiplier_modulus", std::abs(split.plus.multiplier));
      p.kv("split_minus_multiplier_modulus", std::abs(split.minus.multiplier));
    } else if (*classify_cmd) {
      if (!std::isfinite(a)) throw invalid_input("parameter a must be finite");
      const cplx delta{dre, dim};
      const auto o = classify_perturbation(perturb(Per1Param{a}, delta), budget);
      p.kv("a", a);
      p.kv("delta", delta);
      p.kv("verdict", to_string(o.verdict));
      p.orbit("critical_plus", o.critical_plus);
      p.orbit("critical_minus", o.critical_minus);
      for (std::size_t i = 0; i < 3; ++i) {
        const std::string k = "fixed_point_" + std::to_string(i);
        p.kv(k, o.fixed_points[i].location);
        p.kv(k + "_multiplier", o.fixed_points[i].multiplier);
        p.kv(k + "_multiplier_modulus", std::abs(o.fixed_points[i].multiplier));
      }
      if (o.witness) p.kv("witness", static_cast<long>(*o.witness));
      p.kv("min_multiplier_modulus", o.min_multiplier_modulus);
      p.kv("misiurewicz_like", o.misiurewicz_like);
    } else if (*scan_delta_cmd) {
      ScanOptions opt{budget, Margins{}, cfg.jobs, with_phase, cfg.tol};
      const auto grid = scan_delta_disk(Per1Param{a}, radius, n, opt);
      const auto [csv, ppm] = detail::save_grid(cfg, out_path, grid);
      p.kv("cells", static_cast<long>(grid.cells.size()));
      p.kv("csv", csv);
      p.kv("ppm", ppm);
    } else if (*scan_slice_cmd) {
      ScanOptions opt{budget, Margins{}, cfg.jobs, false, cfg.tol};
      const auto grid = scan_slice_a(re_min, re_max, im_min, im_max, n, opt);
      const auto [csv, ppm] = detail::save_grid(cfg, out_path, grid);
      p.kv("cells", static_cast<long>(grid.cells.size()));
      p.kv("csv", csv);
      p.kv("ppm", ppm);
    } else if (*verify_cmd) {
      VerificationReport report;
      if (*v41) {
        report = verify_real_escape(t, cfg);
      } else if (*v42) {
        PhaseThresholdOptions o;
        o.modulus = modulus;
        o.arguments = arguments;
        report = verify_phase_threshold(t, cfg, o);
      } else if (*vcyl) {
        report = verify_cylinder(t, cfg);
      } else {
        if (!t_opt->count() && !a_opt->count()) throw invalid_input("verify theorem needs --t or --a");
        auto v = a_opt->count() ? verify_disk(Per1Param{a}, radius, n, cfg) : verify_theorem_disk(t, radius, n, cfg);
        const std::string stem = out_path.empty() ? (a_opt->count() ? "verify_disk" : "verify_theorem") : out_path;
        const auto [csv, ppm] = detail::save_grid(cfg, stem, v.grid);
        v.report.fact("csv", csv);
        v.report.fact("ppm", ppm);
        report = std::move(v.report);
      }
      out << report.text();
      return report.passed() ? kOk : kFail;
    }
    return kOk;
  } catch (const invalid_input& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const numerical_failure& e) {
    err << "numerical failure: " << e.what() << '\n';
    if (std::isfinite(e.residual())) err << "best_estimate=" << format_real(e.best_estimate().real()) << ','
                                         << format_real(e.best_estimate().imag())
                                         << " residual=" << format_real(e.residual()) << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalid;
  }
}

}  // namespace plab::cli
