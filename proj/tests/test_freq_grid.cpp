#include <algorithm>
#include <cmath>
#include <set>

#include <doctest.h>

#include "mlfir/benchmarks.hpp"
#include "mlfir/freq_grid.hpp"

using namespace mlfir;

namespace {

FilterSpec s1c(FilterType type = FilterType::I, int order = 24) {
  FilterSpec s;
  s.bands = find_benchmark("S1c").bands;
  s.type = type;
  s.order = order;
  s.wordlength = 8;
  return s;
}

// Greedy volume maximization by Gram-Schmidt with largest-residual pivoting.
std::vector<double> greedy_fekete(const FilterSpec& spec, std::size_t target, int factor) {
  const FrequencyGrid cand = uniform_grid(spec, target * static_cast<std::size_t>(factor));
  std::vector<std::vector<double>> cols;
  for (const GridPoint& p : cand.points()) {
    std::vector<double> c(target);
    for (std::size_t m = 0; m < target; ++m) c[m] = basis_eval(spec.type, static_cast<int>(m), p.omega());
    cols.push_back(std::move(c));
  }
  std::vector<bool> used(cols.size(), false);
  std::vector<double> chosen;
  for (std::size_t k = 0; k < target; ++k) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (used[i]) continue;
      double n = 0.0;
      for (double x : cols[i]) n += x * x;
      if (n > best_norm) {
        best_norm = n;
        best = i;
      }
    }
    used[best] = true;
    chosen.push_back(cand[best].omega_pi);
    std::vector<double> q = cols[best];
    const double norm = std::sqrt(best_norm);
    for (double& x : q) x /= norm;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (used[i]) continue;
      double dot = 0.0;
      for (std::size_t m = 0; m < target; ++m) dot += q[m] * cols[i][m];
      for (std::size_t m = 0; m < target; ++m) cols[i][m] -= dot * q[m];
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

TEST_CASE("uniform grid covers every band edge") {
  const FilterSpec s = s1c();
  const FrequencyGrid g = uniform_grid(s, 100);
  for (const Band& b : s.bands) {
    CHECK(g.contains(b.from_pi));
    CHECK(g.contains(b.to_pi));
  }
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i - 1].omega_pi < g[i].omega_pi);
  CHECK_THROWS_AS(uniform_grid(s, 1), SpecError);
}

TEST_CASE("shared band edge carries the intersection of bounds") {
  FilterSpec s;
  s.order = 10;
  s.bands = {{0.0, 0.5, 0.9, 1.1}, {0.5, 1.0, 0.95, 1.2}};
  const GridPoint p = point_for(s, 0.5);
  CHECK(p.lower == 0.95);
  CHECK(p.upper == 1.1);
  CHECK_THROWS_AS(point_for(s1c(), 0.4), SpecError);
}

TEST_CASE("afp selection matches an independent greedy volume maximizer") {
  for (const auto& [type, order] : {std::pair{FilterType::I, 24}, std::pair{FilterType::II, 23}}) {
    const FilterSpec s = s1c(type, order);
    const std::size_t target = 12;
    const AfpGrid afp = afp_grid(s, target, 16, false);
    REQUIRE_FALSE(afp.fell_back);
    std::vector<double> got;
    for (const GridPoint& p : afp.grid.points()) got.push_back(p.omega_pi);
    const auto want = greedy_fekete(s, target, 16);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("afp grid is deterministic and includes edges when forced") {
  const FilterSpec s = s1c();
  const AfpGrid a = afp_grid(s, 4 * 13);
  const AfpGrid b = afp_grid(s, 4 * 13);
  CHECK(a.grid == b.grid);
  for (const Band& band : s.bands) {
    CHECK(a.grid.contains(band.from_pi));
    CHECK(a.grid.contains(band.to_pi));
  }
  CHECK(a.grid.size() >= 4 * 13);
  CHECK(a.grid.size() <= 4 * 13 + 4);
}

TEST_CASE("rank-deficient candidates fall back to a uniform grid") {
  // Type II has c_m(pi) = 0 for all m, so a single band at pi alone is
  // degenerate.
  FilterSpec s;
  s.type = FilterType::II;
  s.order = 9;
  s.bands = {{1.0, 1.0, -0.1, 0.1}};
  const AfpGrid a = afp_grid(s, 3, 1);
  CHECK(a.fell_back);
}

TEST_CASE("refinement only grows the grid") {
  const FilterSpec s = s1c();
  const FrequencyGrid g = afp_grid(s, 52).grid;
  const std::vector<NewPoint> add{{0.123456, 0}, {0.777, 1}, {g[3].omega_pi, g[3].band}};
  const FrequencyGrid r = refine(g, s, add);
  CHECK(r.size() == g.size() + 2);
  for (const GridPoint& p : g.points()) CHECK(r.contains(p.omega_pi));
  CHECK(r.contains(0.123456));
  const FrequencyGrid again = refine(r, s, add);
  CHECK(again == r);
  const std::vector<NewPoint> bad{{0.4, 0}};
  CHECK_THROWS_AS(refine(g, s, bad), SpecError);
}
