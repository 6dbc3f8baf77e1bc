#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include <doctest.h>

#include "mlfir/ilp2.hpp"

using namespace mlfir;

namespace {

// Every odd result of |2^a u +- 2^b v| / 2^r up to c_max, over a shift range
// wider than any useful one.
std::set<std::int64_t> brute_aop(std::int64_t u, std::int64_t v, std::int64_t c_max) {
  std::set<std::int64_t> out;
  int bits = 0;
  while ((std::int64_t{1} << bits) <= c_max) ++bits;
  for (int a = 0; a <= bits + 2; ++a)
    for (int b = 0; b <= bits + 2; ++b)
      for (int sign : {1, -1}) {
        std::int64_t x = (u << a) + sign * (v << b);
        if (x < 0) x = -x;
        for (int r = 0; r <= 2 * bits + 4 && x > 0; ++r) {
          if (x % (std::int64_t{1} << r) != 0) break;
          const std::int64_t y = x >> r;
          if (y % 2 == 1 && y <= c_max) out.insert(y);
        }
      }
  return out;
}

struct BruteStages {
  std::vector<std::set<std::int64_t>> values;
  std::vector<std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>>> triplets;
};

BruteStages brute_stages(int B, int S) {
  const std::int64_t c_max = std::int64_t{1} << (B + 1);
  BruteStages st;
  st.values.push_back({1});
  st.triplets.emplace_back();
  for (int s = 1; s <= S; ++s) {
    std::set<std::int64_t> vals;
    std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> trip;
    for (std::int64_t u : st.values.back())
      for (std::int64_t v : st.values.back()) {
        if (u > v) continue;
        for (std::int64_t w : brute_aop(u, v, c_max)) {
          vals.insert(w);
          trip.insert({u, v, w});
        }
      }
    st.values.push_back(vals);
    st.triplets.push_back(trip);
  }
  return st;
}

// Fewest A-operations reaching `target` with every node at most `depth`
// operations from the input; -1 if none within `limit`.
int brute_scm(std::int64_t target, int depth, std::int64_t c_max, int limit) {
  std::map<std::int64_t, int> have{{1, 0}};
  std::function<bool(int)> search = [&](int budget) -> bool {
    if (have.contains(target)) return true;
    if (budget == 0) return false;
    const auto snapshot = have;
    for (const auto& [u, du] : snapshot)
      for (const auto& [v, dv] : snapshot) {
        if (u > v) continue;
        const int d = std::max(du, dv) + 1;
        if (d > depth) continue;
        for (std::int64_t w : brute_aop(u, v, c_max)) {
          if (have.contains(w)) continue;
          have[w] = d;
          const bool ok = search(budget - 1);
          have.erase(w);
          if (ok) return true;
        }
      }
    return false;
  };
  for (int k = 0; k <= limit; ++k)
    if (search(k)) return k;
  return -1;
}

}  // namespace

TEST_CASE("odd part and depth limits") {
  CHECK(odd_part(40) == 5);
  CHECK(odd_part(7) == 7);
  CHECK_THROWS_AS(odd_part(0), std::invalid_argument);
  CHECK(max_adder_depth(8) >= 2);
}

TEST_CASE("A-operation results match brute force") {
  for (int B = 2; B <= 5; ++B) {
    const std::int64_t c_max = std::int64_t{1} << (B + 1);
    for (std::int64_t u = 1; u <= c_max; u += 2)
      for (std::int64_t v = u; v <= c_max; v += 2) {
        const auto got = a_star(u, v, c_max);
        const std::set<std::int64_t> got_set(got.begin(), got.end());
        CHECK(got_set.size() == got.size());
        CHECK(got_set == brute_aop(u, v, c_max));
      }
  }
  CHECK_THROWS_AS(a_star(2, 3, 16), std::invalid_argument);
}

TEST_CASE("every configuration reproduces its result") {
  const std::int64_t c_max = 64;
  for (std::int64_t u : {1, 3, 7, 21})
    for (std::int64_t v : {1, 5, 9, 63})
      for (std::int64_t w : a_star(u, v, c_max)) {
        const auto configs = aop_configs(u, v, w, c_max);
        REQUIRE_FALSE(configs.empty());
        for (const AOpConfig& q : configs) CHECK(apply_aop(u, v, q) == w);
      }
  CHECK(aop_configs(1, 1, 11, 64).empty());
}

TEST_CASE("stage sets match brute-force enumeration") {
  for (int B = 2; B <= 4; ++B) {
    const StageSets sets = build_stage_sets(B, 2);
    const BruteStages want = brute_stages(B, 2);
    for (int s = 0; s <= 2; ++s) {
      const auto& vals = sets.values[static_cast<std::size_t>(s)];
      CHECK(std::set<std::int64_t>(vals.begin(), vals.end()) == want.values[static_cast<std::size_t>(s)]);
      std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> trip;
      for (const Triplet& t : sets.triplets[static_cast<std::size_t>(s)]) trip.insert({t.u, t.v, t.w});
      CHECK(trip == want.triplets[static_cast<std::size_t>(s)]);
    }
  }
}

TEST_CASE("known stage-set members") {
  const StageSets sets = build_stage_sets(3, 2);
  CHECK(sets.values[1] == std::vector<std::int64_t>{1, 3, 5, 7, 9, 15});
  const auto& t2 = sets.triplets[2];
  for (const Triplet t : {Triplet{1, 3, 11}, Triplet{1, 5, 11}, Triplet{3, 5, 11}})
    CHECK(std::binary_search(t2.begin(), t2.end(), t));
  CHECK(sets.contains(2, 11));
  CHECK_FALSE(sets.contains(1, 11));
}

TEST_CASE("stage-set cache round trip and cap") {
  const auto dir = std::filesystem::temp_directory_path() / "mlfir_stage_test";
  std::filesystem::remove_all(dir);
  StageSetOptions o;
  o.cache_dir = dir.string();
  const StageSets a = build_stage_sets(5, 2, o);
  const auto file = dir / stage_set_cache_name(5, 2);
  REQUIRE(std::filesystem::exists(file));
  const auto b = read_stage_sets(file.string(), 5, 2);
  REQUIRE(b.has_value());
  CHECK(*b == a);
  CHECK_FALSE(read_stage_sets(file.string(), 5, 3).has_value());
  StageSetOptions tiny;
  tiny.triplet_cap = 10;
  CHECK_THROWS_AS(build_stage_sets(6, 2, tiny), StageSetTooLarge);
  std::filesystem::remove_all(dir);
}

TEST_CASE("constant-multiplication builds match brute-force SCM") {
  const int B = 5;
  const std::int64_t c_max = std::int64_t{1} << (B + 1);
  const StageSets sets = build_stage_sets(B, 2);
  for (std::int64_t c = 1; c < (1 << B); c += 2) {
    for (int S = 1; S <= 2; ++S) {
      CAPTURE(c);
      CAPTURE(S);
      const int want = brute_scm(c, S, c_max, 3);
      const Ilp2Instance inst = build_ilp2_targets({c}, B, S, sets);
      milp::SolveOptions so;
      so.relax = inst.relaxable;
      const milp::SolveOutcome out = milp::solve(inst.model, so);
      if (want < 0) {
        CHECK(out.status == milp::SolveStatus::Infeasible);
        continue;
      }
      REQUIRE(out.status == milp::SolveStatus::Optimal);
      const AdderGraph g = extract_from_ilp2(inst, out);
      CHECK(g.adder_count() == want);
      CHECK(g.depth() <= S);
      CHECK(g.coefficients() == std::vector<std::int64_t>{c});
    }
  }
}

TEST_CASE("MCM {7, 23} with depth two needs two adders") {
  const StageSets sets = build_stage_sets(5, 2);
  const Ilp2Instance inst = build_ilp2_targets({7, -23, 0, 14}, 5, 2, sets);
  milp::SolveOptions so;
  so.relax = inst.relaxable;
  const auto out = milp::solve(inst.model, so);
  REQUIRE(out.status == milp::SolveStatus::Optimal);
  const AdderGraph g = extract_from_ilp2(inst, out);
  CHECK(g.adder_count() == 2);
  CHECK(g.coefficients() == std::vector<std::int64_t>{7, -23, 0, 14});
}
