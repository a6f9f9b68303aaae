#pragma once

// Parameter sweeps and their serialization.
//
// Cell (i, j) of an n x n grid sits at
//     center + (hw_re * (2j + 1 - n) / n,  hw_im * (2i + 1 - n) / n),
// so row i = 0 is the lowest imaginary part and the offsets are exactly
// antisymmetric about the center.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "plab/core_dynamics.hpp"
#include "plab/errors.hpp"
#include "plab/perturbation.hpp"

namespace plab {

enum class SliceVerdict { BothBounded, OneEscapes, BothEscape };

inline const char* to_string(SliceVerdict v) {
  switch (v) {
    case SliceVerdict::BothBounded: return "BothBounded";
    case SliceVerdict::OneEscapes: return "OneEscapes";
    case SliceVerdict::BothEscape: return "BothEscape";
  }
  return "?";
}

struct DiskCell {
  cplx delta{};
  PerturbationOutcome outcome;
  std::optional<double> im_sigma;  // reliable lifted-phase estimates only
};

struct SliceCell {
  cplx a{};
  OrbitClassification critical_plus;
  OrbitClassification critical_minus;

  SliceVerdict verdict() const {
    const int n = int(critical_plus.escaped()) + int(critical_minus.escaped());
    return n == 2 ? SliceVerdict::BothEscape : n == 1 ? SliceVerdict::OneEscapes : SliceVerdict::BothBounded;
  }
};

template <class Cell>
struct ScanGrid {
  cplx center{};
  double hw_re = 0.0;
  double hw_im = 0.0;
  int n = 0;
  std::vector<Cell> cells;  // row-major, row i = imaginary index

  cplx point(int i, int j) const {
    return center + cplx{hw_re * (2.0 * j + 1.0 - n) / n, hw_im * (2.0 * i + 1.0 - n) / n};
  }
  const Cell& at(int i, int j) const { return cells[static_cast<std::size_t>(i) * n + j]; }
};

using DiskScan = ScanGrid<DiskCell>;
using SliceScan = ScanGrid<SliceCell>;

struct ScanOptions {
  ClassifyBudget budget{};
  Margins margins{};
  int jobs = 1;
  bool with_phase = false;  // estimate Im sigma on cells that are not BothCriticalEscape
  double tol = kDefaultTol;
};

namespace detail {

/// Runs row(i) for i in [0, rows) on up to `jobs` threads.  Rows are claimed
/// dynamically; each writes only its own cells.
template <class RowFn>
void for_each_row(int rows, int jobs, RowFn row) {
  const int workers = std::clamp(jobs, 1, std::max(rows, 1));
  if (workers == 1) {
    for (int i = 0; i < rows; ++i) row(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < rows; i = next++) row(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
        next = rows;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline void check_grid(int n, int jobs) {
  if (n < 1) throw invalid_input("grid resolution must be at least 1");
  if (n > 8192) throw invalid_input("grid resolution above 8192 is not supported");
  if (jobs < 1) throw invalid_input("jobs must be at least 1");
}

}  // namespace detail

/// Classifies g_delta = f_a + delta over the square |Re delta|, |Im delta| <= radius.
inline DiskScan scan_delta_disk(Per1Param a, double radius, int n, const ScanOptions& opt = {}) {
  detail::check_grid(n, opt.jobs);
  if (!std::isfinite(a.a)) throw invalid_input("parameter a must be finite");
  if (!(radius > 0.0) || !(radius <= kEggbeaterBound))
    throw invalid_input("disk radius must lie in (0, eggbeater bound]");

  DiskScan grid{cplx{}, radius, radius, n, std::vector<DiskCell>(static_cast<std::size_t>(n) * n)};
  std::optional<LiftedPhaseEstimator> phase;
  if (opt.with_phase) phase.emplace(a, PhaseOptions{}, opt.tol);

  detail::for_each_row(n, opt.jobs, [&](int i) {
    for (int j = 0; j < n; ++j) {
      DiskCell& cell = grid.cells[static_cast<std::size_t>(i) * n + j];
      cell.delta = grid.point(i, j);
      const GenericCubic g{cplx{a.a, 0.0}, cplx{1.0, 0.0}, cell.delta};
      cell.outcome = classify_perturbation(g, opt.budget, opt.margins);
      if (phase && cell.outcome.verdict != PerturbationVerdict::BothCriticalEscape &&
          std::abs(cell.delta) <= kEggbeaterBound) {
        try {
          const auto e = phase->estimate(cell.delta);
          if (e.reliable) cell.im_sigma = e.im_sigma;
        } catch (const numerical_failure&) {
        } catch (const invalid_input&) {
        }
      }
    }
  });
  return grid;
}

/// Classifies both critical orbits of f_a for complex a over a rectangle.
inline SliceScan scan_slice_a(double re_min, double re_max, double im_min, double im_max, int n,
                              const ScanOptions& opt = {}) {
  detail::check_grid(n, opt.jobs);
  if (!(re_min < re_max) || !(im_min < im_max) || !std::isfinite(re_max - re_min) || !std::isfinite(im_max - im_min))
    throw invalid_input("slice ranges must be finite with min < max");
  const cplx center{0.5 * (re_min + re_max), 0.5 * (im_min + im_max)};
  SliceScan grid{center, 0.5 * (re_max - re_min), 0.5 * (im_max - im_min), n,
                 std::vector<SliceCell>(static_cast<std::size_t>(n) * n)};
  detail::for_each_row(n, opt.jobs, [&](int i) {
    for (int j = 0; j < n; ++j) {
      SliceCell& cell = grid.cells[static_cast<std::size_t>(i) * n + j];
      cell.a = grid.point(i, j);
      const GenericCubic f{cell.a, cplx{1.0, 0.0}, cplx{}};
      const auto crit = critical_points(f);
      cell.critical_plus = classify_orbit(f, crit.plus, opt.budget.escape_radius, opt.budget.max_iter);
      cell.critical_minus = classify_orbit(f, crit.minus, opt.budget.escape_radius, opt.budget.max_iter);
    }
  });
  return grid;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader = "re,im,verdict,escape_iter_plus,escape_iter_minus,min_multiplier_modulus,im_sigma";

inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string opt_iter(const OrbitClassification& o) {
  return o.escape_iterate ? std::to_string(*o.escape_iterate) : std::string{};
}

}  // namespace detail

inline void write_csv(std::ostream& out, const DiskScan& grid) {
  out << kCsvHeader << '\n';
  for (const auto& c : grid.cells) {
    out << format_real(c.delta.real()) << ',' << format_real(c.delta.imag()) << ',' << to_string(c.outcome.verdict)
        << ',' << detail::opt_iter(c.outcome.critical_plus) << ',' << detail::opt_iter(c.outcome.critical_minus) << ','
        << format_real(c.outcome.min_multiplier_modulus) << ',' << (c.im_sigma ? format_real(*c.im_sigma) : "")
        << '\n';
  }
}

inline void write_csv(std::ostream& out, const SliceScan& grid) {
  out << kCsvHeader << '\n';
  for (const auto& c : grid.cells) {
    out << format_real(c.a.real()) << ',' << format_real(c.a.imag()) << ',' << to_string(c.verdict()) << ','
        << detail::opt_iter(c.critical_plus) << ',' << detail::opt_iter(c.critical_minus) << ",,\n";
  }
}

// ---------------------------------------------------------------------------
// PPM

struct Rgb {
  std::uint8_t r, g, b;
  bool operator==(const Rgb&) const = default;
};

namespace palette {
inline constexpr Rgb kAttracting{40, 80, 220};
inline constexpr Rgb kParabolic{40, 180, 70};
inline constexpr Rgb kMisiurewicz{220, 30, 30};
inline constexpr Rgb kUndetermined{128, 128, 128};
inline constexpr Rgb kBounded{0, 0, 0};
}  // namespace palette

/// White for fast escape, fading towards a light gray as escape slows.
inline Rgb escape_shade(long iterate, double tint = 1.0) {
  const double slow = std::min(1.0, std::log1p(static_cast<double>(std::max(iterate, 0L))) / std::log1p(1e5));
  const auto level = static_cast<std::uint8_t>(std::lround(255.0 - 95.0 * slow));
  return {level, level, static_cast<std::uint8_t>(std::lround(level * tint))};
}

inline Rgb cell_color(const DiskCell& c) {
  const auto& o = c.outcome;
  if (o.misiurewicz_like) return palette::kMisiurewicz;
  switch (o.verdict) {
    case PerturbationVerdict::BothCriticalEscape:
      return escape_shade(std::max(*o.critical_plus.escape_iterate, *o.critical_minus.escape_iterate));
    case PerturbationVerdict::OneCriticalEscapes: {
      const auto& esc = o.critical_plus.escaped() ? o.critical_plus : o.critical_minus;
      return escape_shade(*esc.escape_iterate, 0.75);
    }
    case PerturbationVerdict::AttractingFixedPoint: return palette::kAttracting;
    case PerturbationVerdict::ParabolicFixedPoint: return palette::kParabolic;
    case PerturbationVerdict::Undetermined: return palette::kUndetermined;
  }
  return palette::kUndetermined;
}

inline Rgb cell_color(const SliceCell& c) {
  switch (c.verdict()) {
    case SliceVerdict::BothEscape:
      return escape_shade(std::max(*c.critical_plus.escape_iterate, *c.critical_minus.escape_iterate));
    case SliceVerdict::OneEscapes: {
      const auto& esc = c.critical_plus.escaped() ? c.critical_plus : c.critical_minus;
      return escape_shade(*esc.escape_iterate, 0.75);
    }
    case SliceVerdict::BothBounded: return palette::kBounded;
  }
  return palette::kUndetermined;
}

/// Binary P6, top row = highest imaginary part.
template <class Cell>
void write_ppm(std::ostream& out, const ScanGrid<Cell>& grid) {
  out << "P6\n" << grid.n << ' ' << grid.n << "\n255\n";
  std::vector<char> row(static_cast<std::size_t>(grid.n) * 3);
  for (int i = grid.n - 1; i >= 0; --i) {
    for (int j = 0; j < grid.n; ++j) {
      const Rgb c = cell_color(grid.at(i, j));
      row[3 * j] = static_cast<char>(c.r);
      row[3 * j + 1] = static_cast<char>(c.g);
      row[3 * j + 2] = static_cast<char>(c.b);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

template <class Grid>
void save_csv(const std::string& path, const Grid& grid) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw invalid_input("cannot open output file: " + path);
  write_csv(f, grid);
}

template <class Grid>
void save_ppm(const std::string& path, const Grid& grid) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw invalid_input("cannot open output file: " + path);
  write_ppm(f, grid);
}

}  // namespace plab
