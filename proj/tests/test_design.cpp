#include <cmath>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "mlfir/benchmarks.hpp"
#include "mlfir/design.hpp"

using namespace mlfir;

namespace {

const PublishedRow& row(const std::string& name, const std::string& source, double gain) {
  for (const PublishedRow& r : published_rows())
    if (r.name == name && r.source == source && r.gain == gain) return r;
  FAIL("missing fixture row");
  throw std::logic_error("unreachable");
}

FilterSpec small_lowpass() {
  FilterSpec s;
  s.bands = {{0.0, 0.2, 0.9, 1.1}, {0.55, 1.0, -0.08, 0.08}};
  s.type = FilterType::I;
  s.order = 8;
  s.wordlength = 5;
  return s;
}

}  // namespace

TEST_CASE("published rows validate as printed") {
  const PublishedRow& s1a = row("S1a", "ours", 1.251);
  const auto h = from_printed_order(s1a.printed);
  const FilterSpec spec = s1a.spec();
  CHECK(validate(spec, h, s1a.gain, default_density(spec)).max_violation == 0.0);

  const PublishedRow& sy = row("S1c", "sy11a", 1.34766);
  const FilterSpec s1c = sy.spec();
  const auto rep = validate(s1c, from_printed_order(sy.printed), sy.gain, default_density(s1c));
  CHECK(rep.max_violation == doctest::Approx(0.00118).epsilon(0.1));
  CHECK(rep.band_max == 1);
  CHECK(rep.side_max == -1);
}

TEST_CASE("least-violation completion matches exhaustive search") {
  FilterSpec s = small_lowpass();
  s.gain = GainMode::fixed(1.0);
  const std::vector<std::int64_t> full{9, 6, 1, -2, -1};
  const std::size_t n = 400;
  for (std::size_t drop = 0; drop < full.size(); ++drop) {
    std::vector<std::int64_t> partial = full;
    partial.erase(partial.begin() + static_cast<std::ptrdiff_t>(drop));
    double best = INFINITY;
    for (std::size_t k = 0; k <= partial.size(); ++k)
      for (std::int64_t x = -s.max_magnitude(); x <= s.max_magnitude(); ++x) {
        std::vector<std::int64_t> h = partial;
        h.insert(h.begin() + static_cast<std::ptrdiff_t>(k), x);
        best = std::min(best, validate(s, h, 1.0, n).max_violation);
      }
    const Completion c = least_violation_completion(s, partial, 1.0, n);
    CHECK(c.lower_bound <= best + 1e-15);
    CHECK(c.report.max_violation >= best);
    CHECK(c.report.max_violation == doctest::Approx(best).epsilon(1e-6));
    CHECK(c.coefficients.size() == full.size());
  }
  CHECK_THROWS_AS(least_violation_completion(s, full, 1.0, n), SpecError);
}

TEST_CASE("printed row with a missing tap") {
  const PublishedRow& sy = row("S2b", "sy11a", 10.47032);
  REQUIRE_FALSE(sy.complete());
  const auto h = from_printed_order(sy.printed);
  // Read as printed (29 taps, order 57) it misses the passband edge by 0.01395.
  const FilterSpec printed = sy.as_printed();
  CHECK(printed.order == 57);
  const auto rep = validate(printed, h, sy.gain, default_density(printed));
  CHECK(rep.max_violation >= 0.0139);
  CHECK(rep.max_violation == doctest::Approx(0.01395).epsilon(0.01));
  // With the lost tap restored at order 59 the filter is close to valid.
  const FilterSpec spec = sy.spec();
  const Completion c = least_violation_completion(spec, h, sy.gain, default_density(spec));
  CHECK(c.lower_bound < 1e-3);
}

TEST_CASE("zero filter violates the passband by 1 - delta") {
  FilterSpec s = small_lowpass();
  const std::vector<std::int64_t> zero(5, 0);
  const auto rep = validate(s, zero, 1.0, 200);
  CHECK(rep.max_violation == doctest::Approx(0.9));
  CHECK(rep.band_max == 0);
  CHECK(rep.band_worst[1].violation == 0.0);
  CHECK_THROWS_AS(validate(s, std::vector<std::int64_t>(3, 0), 1.0, 200), SpecError);
}

TEST_CASE("uniform upper violation is fixed by one rescale") {
  FilterSpec s;
  s.type = FilterType::I;
  s.order = 0;
  s.wordlength = 4;
  s.gain = GainMode::variable(0.5, 2.0);
  s.bands = {{0.0, 1.0, 0.9, 1.1}};
  const std::vector<std::int64_t> h{20};
  const auto rep = validate(s, h, 1.0, 64);
  REQUIRE(rep.side_max == 1);
  CHECK(rep.max_violation == doctest::Approx(0.15));
  const GainAdjustment adj = adjust_gain(s, h, 1.0, rep, 64);
  CHECK(adj.improved);
  CHECK(adj.gain == doctest::Approx(1.25 / 1.1).epsilon(1e-8));
  CHECK(adj.report.valid());

  s.gain = GainMode::fixed(1.0);
  CHECK_FALSE(adjust_gain(s, h, 1.0, rep, 64).improved);
}

TEST_CASE("opposite violations cannot be fixed by the gain") {
  FilterSpec s = small_lowpass();
  s.gain = GainMode::variable(0.1, 10.0);
  std::vector<std::int64_t> h(5, 0);
  h[0] = 10;  // flat response
  const auto rep = validate(s, h, 1.0, 300);
  REQUIRE_FALSE(rep.valid());
  const GainAdjustment adj = adjust_gain(s, h, 1.0, rep, 300);
  CHECK_FALSE(adj.improved);
  CHECK_FALSE(feasible_gain_interval(s, h, 300).has_value());
}

TEST_CASE("feasible gain interval is tight") {
  const PublishedRow& r = row("S1c", "ours", 1.25615);
  FilterSpec s = r.spec();
  s.gain = GainMode::variable(0.5, 2.0);
  const auto h = from_printed_order(r.printed);
  const std::size_t n = default_density(s);
  const auto iv = feasible_gain_interval(s, h, n);
  REQUIRE(iv.has_value());
  CHECK(iv->first <= r.gain);
  CHECK(iv->second >= r.gain);
  CHECK(validate(s, h, 0.5 * (iv->first + iv->second), n).valid());
  CHECK_FALSE(validate(s, h, iv->first * (1 - 1e-6), n).valid());
  CHECK_FALSE(validate(s, h, iv->second * (1 + 1e-6), n).valid());
}

TEST_CASE("a spec admitting the zero filter costs nothing") {
  FilterSpec s;
  s.type = FilterType::I;
  s.order = 10;
  s.wordlength = 6;
  s.bands = {{0.0, 1.0, -0.1, 0.1}};
  for (Method m : {Method::Ilp2, Method::Ilp1Total}) {
    DesignOptions o;
    o.method = m;
    const DesignOutcome out = design(s, o);
    REQUIRE(out.status == DesignStatus::Optimal);
    CHECK(out.iterations == 1);
    CHECK(out.solution->adders_total == 0);
    CHECK(out.report->valid());
  }
}

TEST_CASE("small low-pass: both methods give valid filters, total-adder method no worse") {
  const FilterSpec s = small_lowpass();
  DesignOptions o2;
  o2.method = Method::Ilp2;
  o2.depth = 2;
  const DesignOutcome a = design(s, o2);
  DesignOptions o1;
  o1.method = Method::Ilp1Total;
  const DesignOutcome b = design(s, o1);
  REQUIRE(a.status == DesignStatus::Optimal);
  REQUIRE(b.status == DesignStatus::Optimal);
  for (const DesignOutcome* out : {&a, &b}) {
    CHECK(out->report->valid());
    CHECK_NOTHROW(out->solution->check());
    CHECK(validate(s, out->solution->coefficients, out->solution->gain, 10000).valid());
    const AfpGrid start = afp_grid(s, 4 * 5);
    for (const GridPoint& p : start.grid.points()) CHECK(out->grid.contains(p.omega_pi));
  }
  CHECK(b.solution->adders_total <= a.solution->adders_total);
  CHECK(a.solution->adder_depth <= 2);
}

TEST_CASE("design is deterministic") {
  const FilterSpec s = small_lowpass();
  const DesignOutcome a = design(s);
  const DesignOutcome b = design(s);
  REQUIRE(a.solution.has_value());
  REQUIRE(b.solution.has_value());
  CHECK(a.solution->coefficients == b.solution->coefficients);
  CHECK(a.solution->gain == b.solution->gain);
  CHECK(a.solution->graph == b.solution->graph);
  CHECK(a.grid == b.grid);
}

TEST_CASE("gain changes never touch the topology") {
  const DesignOutcome a = design(small_lowpass());
  REQUIRE(a.solution.has_value());
  const DesignSolution& s = *a.solution;
  const DesignSolution t = make_solution(s.spec, s.coefficients, s.gain * 1.01, s.graph, s.optimality);
  CHECK(t.adders_mb == s.adders_mb);
  CHECK(t.adders_structural == s.adders_structural);
  CHECK(t.graph == s.graph);
}

TEST_CASE("infeasible specifications are classified") {
  FilterSpec s = small_lowpass();
  s.bands[0].lower = 5.0;
  s.bands[0].upper = 6.0;
  s.gain = GainMode::fixed(1.0);
  CHECK(design(s).status == DesignStatus::SpecInfeasible);

  // Depth 0 only allows powers of two; a flat 3/4 passband needs 3.
  FilterSpec t;
  t.type = FilterType::I;
  t.order = 0;
  t.wordlength = 2;
  t.gain = GainMode::fixed(1.0);
  t.bands = {{0.0, 1.0, 0.7, 0.8}};
  DesignOptions o;
  o.depth = 0;
  CHECK(design(t, o).status == DesignStatus::IntegerInfeasible);
  o.depth = 1;
  const DesignOutcome ok = design(t, o);
  REQUIRE(ok.status == DesignStatus::Optimal);
  CHECK(ok.solution->coefficients == std::vector<std::int64_t>{3});
}

TEST_CASE("result bundle") {
  const FilterSpec s = small_lowpass();
  const DesignOutcome out = design(s);
  const auto dir = std::filesystem::temp_directory_path() / "mlfir_bundle_test";
  std::filesystem::remove_all(dir);
  write_bundle(dir.string(), s, out);
  for (const char* f : {"solution.json", "graph.dot", "response.csv", "log.txt"})
    CHECK(std::filesystem::exists(dir / f));
  std::ifstream csv(dir / "response.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "omega_over_pi,H_normalized,lower,upper");
  const auto doc = nlohmann::json::parse(std::ifstream(dir / "solution.json"));
  CHECK(doc["status"] == "optimal");
  CHECK(doc["solution"]["A"] == out.solution->adders_total);
  std::filesystem::remove_all(dir);
}
