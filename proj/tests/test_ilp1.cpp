#include <bit>
#include <functional>
#include <map>
#include <set>

#include <doctest.h>

#include "mlfir/ilp1.hpp"

using namespace mlfir;

namespace {

std::set<std::int64_t> odd_sums(std::int64_t u, std::int64_t v, std::int64_t c_max) {
  std::set<std::int64_t> out;
  for (int a = 0; a <= 12; ++a)
    for (int b = 0; b <= 12; ++b)
      for (int sign : {1, -1}) {
        std::int64_t x = (u << a) + sign * (v << b);
        if (x < 0) x = -x;
        while (x > 0 && x % 2 == 0) x /= 2;
        if (x > 0 && x <= c_max) out.insert(x);
      }
  return out;
}

// Fewest additions building every target from 1 (iterative deepening).
int brute_mcm(const std::vector<std::int64_t>& targets, std::int64_t c_max, int limit) {
  std::set<std::int64_t> need;
  for (std::int64_t t : targets) {
    if (t == 0) continue;
    std::int64_t x = t < 0 ? -t : t;
    while (x % 2 == 0) x /= 2;
    need.insert(x);
  }
  std::set<std::int64_t> have{1};
  std::function<bool(int)> search = [&](int budget) -> bool {
    if (std::includes(have.begin(), have.end(), need.begin(), need.end())) return true;
    if (budget == 0) return false;
    const auto snapshot = have;
    for (std::int64_t u : snapshot)
      for (std::int64_t v : snapshot) {
        if (u > v) continue;
        for (std::int64_t w : odd_sums(u, v, c_max)) {
          if (have.contains(w)) continue;
          have.insert(w);
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

int wordlength_for(const std::vector<std::int64_t>& t) {
  std::int64_t top = 1;
  for (auto x : t) top = std::max(top, x < 0 ? -x : x);
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(top)));
}

}  // namespace

TEST_CASE("single constants from the introductory example") {
  CHECK(minimal_mcm({23}).graph.adder_count() == 2);
  CHECK(minimal_mcm({3}).graph.adder_count() == 1);
  CHECK(minimal_mcm({1}).graph.adder_count() == 0);
  CHECK(minimal_mcm({-8}).graph.adder_count() == 0);
  const McmResult r = minimal_mcm({7, 23});
  CHECK(r.status == MethodStatus::Optimal);
  CHECK(r.graph.adder_count() == 2);
  CHECK(r.graph.coefficients() == std::vector<std::int64_t>{7, 23});
}

TEST_CASE("fixed adder count: 23 needs two adders") {
  const ShiftRange shifts = ShiftRange::for_wordlength(5);
  for (int am : {1, 2}) {
    const Ilp1Instance inst = build_ilp1_targets({23}, 5, am, shifts);
    milp::SolveOptions so;
    so.relax = inst.relaxable;
    const auto out = milp::solve(inst.model, so);
    if (am == 1) {
      CHECK(out.status == milp::SolveStatus::Infeasible);
    } else {
      REQUIRE(out.has_solution());
      const AdderGraph g = extract_from_ilp1(inst, out);
      CHECK(g.coefficients() == std::vector<std::int64_t>{23});
      CHECK_NOTHROW(simulate(g));
    }
  }
}

TEST_CASE("single-constant optimum matches brute force") {
  for (std::int64_t c = 1; c < 64; c += 2) {
    CAPTURE(c);
    const int B = wordlength_for({c});
    const int want = brute_mcm({c}, std::int64_t{1} << (B + 1), 4);
    const McmResult r = minimal_mcm({c});
    CHECK(r.graph.adder_count() == want);
    CHECK(r.graph.coefficients() == std::vector<std::int64_t>{c});
  }
}

TEST_CASE("pairs of constants match brute force") {
  const std::vector<std::vector<std::int64_t>> cases{{5, 7}, {3, 21}, {11, 13}, {9, 45}, {-15, 17, 0}, {25, 27}};
  for (const auto& t : cases) {
    const int B = wordlength_for(t);
    const int want = brute_mcm(t, std::int64_t{1} << (B + 1), 4);
    const McmResult r = minimal_mcm(t);
    CHECK(r.graph.adder_count() == want);
    CHECK(r.graph.coefficients() == t);
  }
}

TEST_CASE("right shifts are available to the model") {
  // 11 = (9 + 13) / 2 is one way; whatever the solver picks must simulate.
  const McmResult r = minimal_mcm({9, 11, 13});
  CHECK_NOTHROW(simulate(r.graph));
  CHECK(r.graph.coefficients() == std::vector<std::int64_t>{9, 11, 13});
}
