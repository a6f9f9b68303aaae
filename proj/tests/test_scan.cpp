#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "plab/scan.hpp"

using namespace plab;

namespace {

const Per1Param& a2() {
  static const Per1Param a = find_parameter_for_height(2.0);
  return a;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("grid cells map affinely and symmetrically") {
  ScanGrid<int> g{cplx{0.5, -0.25}, 2.0, 1.0, 4, {}};
  CHECK(g.point(0, 0) == cplx{0.5 - 1.5, -0.25 - 0.75});
  CHECK(g.point(3, 3) == cplx{0.5 + 1.5, -0.25 + 0.75});
  const ScanGrid<int> z{cplx{}, 1e-4, 1e-4, 64, {}};
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      CHECK(z.point(i, j) == -z.point(63 - i, 63 - j));
      CHECK(z.point(i, j) == std::conj(z.point(63 - i, j)));
    }
}

TEST_CASE("delta scan: real axis escapes, center is parabolic, conjugate symmetry") {
  const int n = 9;
  const auto g = scan_delta_disk(a2(), 1e-4, n);
  REQUIRE(g.cells.size() == static_cast<std::size_t>(n * n));
  CHECK(g.at(4, 4).delta == cplx{});
  CHECK(g.at(4, 4).outcome.verdict == PerturbationVerdict::ParabolicFixedPoint);
  for (int j = 5; j < n; ++j) {
    CHECK(g.at(4, j).delta.imag() == 0.0);
    CHECK(g.at(4, j).delta.real() > 0.0);
    CHECK(g.at(4, j).outcome.verdict == PerturbationVerdict::BothCriticalEscape);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CHECK(g.at(i, j).outcome.verdict == g.at(n - 1 - i, j).outcome.verdict);
      CHECK_FALSE(g.at(i, j).outcome.misiurewicz_like);
    }
}

TEST_CASE("delta scan at a = 0.5 has no misiurewicz-like cell") {
  const auto g = scan_delta_disk(Per1Param{0.5}, 1e-4, 7);
  for (const auto& c : g.cells) {
    CHECK_FALSE(c.outcome.misiurewicz_like);
    CHECK((c.outcome.verdict == PerturbationVerdict::AttractingFixedPoint ||
           c.outcome.verdict == PerturbationVerdict::ParabolicFixedPoint));
  }
}

TEST_CASE("scans are bit-identical across worker counts") {
  ScanOptions one;
  one.with_phase = true;
  ScanOptions three = one;
  three.jobs = 3;
  const auto g1 = scan_delta_disk(a2(), 5e-5, 8, one);
  const auto g3 = scan_delta_disk(a2(), 5e-5, 8, three);
  std::ostringstream c1, c3, p1, p3;
  write_csv(c1, g1);
  write_csv(c3, g3);
  write_ppm(p1, g1);
  write_ppm(p3, g3);
  CHECK(c1.str() == c3.str());
  CHECK(p1.str() == p3.str());

  ScanOptions s1, s3;
  s1.budget.max_iter = 2000;
  s3 = s1;
  s3.jobs = 4;
  std::ostringstream a1, a3;
  write_csv(a1, scan_slice_a(-2.0, 2.0, -1.5, 1.5, 12, s1));
  write_csv(a3, scan_slice_a(-2.0, 2.0, -1.5, 1.5, 12, s3));
  CHECK(a1.str() == a3.str());
}

TEST_CASE("delta CSV schema") {
  ScanOptions opt;
  opt.with_phase = true;
  const auto g = scan_delta_disk(a2(), 1e-4, 5, opt);
  std::ostringstream s;
  write_csv(s, g);
  const auto ls = lines(s.str());
  REQUIRE(ls.size() == 26);
  CHECK(ls[0] == "re,im,verdict,escape_iter_plus,escape_iter_minus,min_multiplier_modulus,im_sigma");
  for (std::size_t k = 1; k < ls.size(); ++k) {
    const auto f = fields(ls[k]);
    REQUIRE(f.size() == 7);
    const auto& cell = g.cells[k - 1];
    CHECK(std::stod(f[0]) == cell.delta.real());
    CHECK(std::stod(f[1]) == cell.delta.imag());
    CHECK(f[2] == to_string(cell.outcome.verdict));
    CHECK(f[3].empty() == !cell.outcome.critical_plus.escaped());
    CHECK(f[4].empty() == !cell.outcome.critical_minus.escaped());
    CHECK(std::stod(f[5]) == cell.outcome.min_multiplier_modulus);
    CHECK(f[6].empty() == !cell.im_sigma.has_value());
  }
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("slice scan") {
  ScanOptions opt;
  opt.budget.max_iter = 20000;
  SECTION("real a in the interval keeps both critical orbits bounded") {
    const auto g = scan_slice_a(0.9, 1.1, -0.1, 0.1, 1, opt);
    CHECK(g.cells[0].a == cplx{1.0, 0.0});
    CHECK(g.cells[0].verdict() == SliceVerdict::BothBounded);
  }
  SECTION("a = 3 has an escaping critical orbit") {
    const auto g = scan_slice_a(2.9, 3.1, -0.1, 0.1, 1, opt);
    CHECK(g.cells[0].verdict() != SliceVerdict::BothBounded);
  }
  SECTION("picture is symmetric under conjugation") {
    const int n = 10;
    const auto g = scan_slice_a(-3.0, 3.0, -2.0, 2.0, n, opt);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(g.at(i, j).verdict() == g.at(n - 1 - i, j).verdict());
    std::ostringstream s;
    write_csv(s, g);
    const auto ls = lines(s.str());
    REQUIRE(ls.size() == static_cast<std::size_t>(n * n + 1));
    const auto f = fields(ls[1]);
    REQUIRE(f.size() == 7);
    CHECK(f[5].empty());
    CHECK(f[6].empty());
  }
}

TEST_CASE("PPM layout: P6 header, top row is the highest imaginary part") {
  ScanOptions opt;
  opt.budget.max_iter = 2000;
  const auto g = scan_slice_a(-3.0, 3.0, 0.0, 2.0, 6, opt);
  std::ostringstream s;
  write_ppm(s, g);
  const std::string img = s.str();
  const std::string header = "P6\n6 6\n255\n";
  REQUIRE(img.substr(0, header.size()) == header);
  REQUIRE(img.size() == header.size() + 6 * 6 * 3);
  for (int j = 0; j < 6; ++j) {
    const Rgb top = cell_color(g.at(5, j));
    const Rgb bottom = cell_color(g.at(0, j));
    const std::size_t t = header.size() + 3 * j;
    const std::size_t b = header.size() + 3 * (5 * 6 + j);
    CHECK(static_cast<unsigned char>(img[t]) == top.r);
    CHECK(static_cast<unsigned char>(img[t + 2]) == top.b);
    CHECK(static_cast<unsigned char>(img[b]) == bottom.r);
    CHECK(static_cast<unsigned char>(img[b + 1]) == bottom.g);
  }
}

TEST_CASE("palette") {
  DiskCell c;
  c.outcome.verdict = PerturbationVerdict::AttractingFixedPoint;
  CHECK(cell_color(c) == palette::kAttracting);
  c.outcome.verdict = PerturbationVerdict::ParabolicFixedPoint;
  CHECK(cell_color(c) == palette::kParabolic);
  c.outcome.verdict = PerturbationVerdict::Undetermined;
  CHECK(cell_color(c) == palette::kUndetermined);
  c.outcome.misiurewicz_like = true;
  CHECK(cell_color(c) == palette::kMisiurewicz);
  CHECK(escape_shade(0) == Rgb{255, 255, 255});
  CHECK(escape_shade(10).r > escape_shade(10000).r);
}

TEST_CASE("scan argument validation") {
  CHECK_THROWS_AS(scan_delta_disk(a2(), 1e-4, 0), invalid_input);
  CHECK_THROWS_AS(scan_delta_disk(a2(), 2e-3, 4), invalid_input);
  CHECK_THROWS_AS(scan_delta_disk(a2(), 0.0, 4), invalid_input);
  ScanOptions bad;
  bad.jobs = 0;
  CHECK_THROWS_AS(scan_delta_disk(a2(), 1e-4, 4, bad), invalid_input);
  CHECK_THROWS_AS(scan_slice_a(1.0, 0.0, 0.0, 1.0, 4), invalid_input);
  CHECK_THROWS_AS(scan_slice_a(0.0, 1.0, 0.0, NAN, 4), invalid_input);
}
