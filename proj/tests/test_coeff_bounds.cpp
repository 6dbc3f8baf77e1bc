#include <doctest.h>

#include "mlfir/benchmarks.hpp"
#include "mlfir/coeff_bounds.hpp"

using namespace mlfir;

namespace {

FilterSpec s1c_type1() {
  FilterSpec s;
  s.bands = find_benchmark("S1c").bands;
  s.type = FilterType::I;
  s.order = 24;
  s.wordlength = 8;
  return s;
}

bool inside(const CoefficientBounds& inner, const CoefficientBounds& outer) {
  for (std::size_t m = 0; m < inner.size(); ++m)
    if (inner.lo[m] < outer.lo[m] || inner.hi[m] > outer.hi[m]) return false;
  return true;
}

}  // namespace

TEST_CASE("box bounds follow the word length") {
  const CoefficientBounds box = box_bounds(s1c_type1());
  REQUIRE(box.size() == 13);
  CHECK(box.lo[0] == -255);
  CHECK(box.hi[12] == 255);
}

TEST_CASE("published coefficient sets lie inside their tightened boxes") {
  for (const PublishedRow& row : published_rows()) {
    if (!row.ours()) continue;
    CAPTURE(row.name);
    CAPTURE(row.gain);
    // The row's own error, if any, is the allowance it was designed with.
    FilterSpec fixed = row.spec();
    fixed.allow_error = row.error;
    fixed = fixed.widened();
    FilterSpec variable = fixed;
    variable.gain = gain_octave(row.gain);
    const auto h = from_printed_order(row.printed);
    for (const FilterSpec& s : {fixed, variable}) {
      const FrequencyGrid grid = afp_grid(s, 4 * static_cast<std::size_t>(s.coefficient_count())).grid;
      const CoefficientBounds b = tighten(s, grid);
      CHECK(b.contains(h));
    }
  }
}

TEST_CASE("bounds shrink as the grid grows and are idempotent") {
  const FilterSpec s = s1c_type1();
  const FrequencyGrid coarse = afp_grid(s, 20).grid;
  const FrequencyGrid fine = refine(coarse, s, std::vector<NewPoint>{{0.05, 0}, {0.21, 0}, {0.66, 1}, {0.93, 1}});
  const CoefficientBounds a = tighten(s, coarse);
  const CoefficientBounds b = tighten(s, fine);
  CHECK(inside(b, a));
  CHECK(inside(a, box_bounds(s)));
  const CoefficientBounds c = tighten(s, fine, &b);
  CHECK(c == b);
  const CoefficientBounds d = tighten(s, coarse, &b);
  CHECK(d == b);
}

TEST_CASE("infeasible relaxations are reported") {
  FilterSpec s;
  s.type = FilterType::I;
  s.order = 2;
  s.wordlength = 2;
  s.gain = GainMode::fixed(1.0);
  s.bands = {{0.0, 1.0, 5.0, 6.0}};
  CHECK_THROWS_AS(tighten(s, uniform_grid(s, 10)), SpecInfeasible);

  // h0 / 4 in [0.3/4, 0.6/4] has a real solution but no integer one.
  FilterSpec t;
  t.type = FilterType::I;
  t.order = 0;
  t.wordlength = 2;
  t.gain = GainMode::fixed(1.0);
  t.bands = {{0.0, 1.0, 0.075, 0.15}};
  CHECK_THROWS_AS(tighten(t, uniform_grid(t, 4)), IntegerInfeasible);
}

TEST_CASE("intersection") {
  const CoefficientBounds a{{-3, 0}, {5, 2}};
  const CoefficientBounds b{{-1, 1}, {7, 1}};
  const CoefficientBounds c = a.intersect(b);
  CHECK(c.lo == std::vector<std::int64_t>{-1, 1});
  CHECK(c.hi == std::vector<std::int64_t>{5, 1});
  const CoefficientBounds d{{6, 0}, {7, 0}};
  CHECK_THROWS_AS(a.intersect(d), IntegerInfeasible);
}

TEST_CASE("response rows: two per grid point, gain column only when variable") {
  FilterSpec s = s1c_type1();
  const FrequencyGrid grid = uniform_grid(s, 30);
  milp::MilpModel m;
  const ResponseVars rv = add_response_rows(m, s, grid, box_bounds(s), milp::VarKind::Integer, 1e-6);
  CHECK(rv.h.size() == 13);
  CHECK(rv.gain_is_variable());
  CHECK(m.constraints().size() >= 2 * grid.size());
  s.gain = GainMode::fixed(1.0);
  milp::MilpModel f;
  CHECK_FALSE(add_response_rows(f, s, grid, box_bounds(s), milp::VarKind::Integer, 0).gain_is_variable());
}
