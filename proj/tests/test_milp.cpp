#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <doctest.h>

#include "mlfir/milp.hpp"

using namespace mlfir::milp;

namespace {

double activity(const std::vector<Term>& terms, const std::vector<double>& x) {
  double a = 0.0;
  for (const Term& t : terms) a += t.coeff * x[static_cast<std::size_t>(t.var)];
  return a;
}

bool holds(const LinearConstraint& c, const std::vector<double>& x, double tol = 1e-9) {
  const double a = activity(c.terms, x);
  switch (c.rel) {
    case Relation::LessEq: return a <= c.rhs + tol;
    case Relation::GreaterEq: return a >= c.rhs - tol;
    case Relation::Equal: return std::abs(a - c.rhs) <= tol;
  }
  return false;
}

bool feasible_with_indicators(const MilpModel& m, const std::vector<double>& x) {
  for (const auto& c : m.constraints())
    if (!holds(c, x)) return false;
  for (const auto& ind : m.indicators()) {
    const bool active = (x[static_cast<std::size_t>(ind.guard)] > 0.5) == ind.guard_value;
    if (active && !holds(ind.implied, x)) return false;
  }
  return true;
}

// Enumerates every integer point of the (all-integer) variable box.
template <typename F>
void for_each_point(const MilpModel& m, F&& f) {
  std::vector<double> x;
  for (const auto& v : m.variables()) x.push_back(v.lo);
  while (true) {
    f(x);
    std::size_t k = 0;
    for (; k < x.size(); ++k) {
      if (x[k] < m.variables()[k].hi) {
        x[k] += 1.0;
        break;
      }
      x[k] = m.variables()[k].lo;
    }
    if (k == x.size()) return;
  }
}

// Optimal value of min c'x s.t. rows, box, by enumerating basic solutions.
double vertex_enumeration(const MilpModel& m) {
  const int n = m.num_variables();
  std::vector<std::pair<std::vector<double>, double>> planes;
  for (const auto& c : m.constraints()) {
    std::vector<double> a(static_cast<std::size_t>(n), 0.0);
    for (const Term& t : c.terms) a[static_cast<std::size_t>(t.var)] += t.coeff;
    planes.push_back({a, c.rhs});
  }
  for (int i = 0; i < n; ++i) {
    std::vector<double> a(static_cast<std::size_t>(n), 0.0);
    a[static_cast<std::size_t>(i)] = 1.0;
    planes.push_back({a, m.variable(i).lo});
    planes.push_back({a, m.variable(i).hi});
  }
  double best = INFINITY;
  std::vector<int> pick(static_cast<std::size_t>(n));
  const int P = static_cast<int>(planes.size());
  // All n-subsets of the planes.
  for (int i = 0; i < n; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    for (int r = 0; r < n; ++r) {
      const auto& [a, rhs] = planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
      for (int c = 0; c < n; ++c) A(r, c) = a[static_cast<std::size_t>(c)];
      b(r) = rhs;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.isInvertible()) {
      const Eigen::VectorXd sol = lu.solve(b);
      std::vector<double> x(sol.data(), sol.data() + n);
      bool ok = true;
      for (int i = 0; i < n && ok; ++i)
        ok = x[static_cast<std::size_t>(i)] >= m.variable(i).lo - 1e-9 && x[static_cast<std::size_t>(i)] <= m.variable(i).hi + 1e-9;
      for (const auto& c : m.constraints())
        if (ok) ok = holds(c, x, 1e-7);
      if (ok) best = std::min(best, activity(m.objective(), x) + m.objective_constant());
    }
    int k = n - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == P - n + k) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < n; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("indicator linearization keeps the feasible set (exhaustive)") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> rhs(-4, 4);
  std::uniform_int_distribution<int> rel(0, 2);
  for (int trial = 0; trial < 40; ++trial) {
    MilpModel m;
    const int guards = trial % 2 == 0 ? 4 : 8;
    for (int g = 0; g < guards; ++g) m.add_binary("g" + std::to_string(g));
    const VarId x = m.add_variable("x", VarKind::Integer, -3, 3);
    const VarId y = m.add_variable("y", VarKind::Integer, -2, 4);
    for (int g = 0; g < guards; ++g) {
      const std::vector<Term> terms{{x, static_cast<double>(coef(rng))}, {y, static_cast<double>(coef(rng))}, {(g + 1) % guards, 1.0}};
      m.add_indicator(g, trial % 3 != 0, terms, static_cast<Relation>(rel(rng)), rhs(rng));
    }
    m.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::LessEq, 5);
    const MilpModel lin = linearize_indicators(m);
    CHECK(lin.indicators().empty());
    int agree = 0;
    for_each_point(m, [&](const std::vector<double>& pt) {
      const bool a = feasible_with_indicators(m, pt);
      const bool b = feasible_with_indicators(lin, pt);
      if (a != b) FAIL("feasibility differs at a point");
      ++agree;
    });
    CHECK(agree == (1 << guards) * 7 * 7);
  }
}

TEST_CASE("twelve-binary model linearizes exactly") {
  MilpModel m;
  for (int i = 0; i < 12; ++i) m.add_binary("b" + std::to_string(i));
  // b_i = 1 forces b_{i+1} + b_{i+2} = 1; b_i = 0 forces sum of the next three <= 2.
  for (int i = 0; i < 10; ++i) m.add_indicator(i, true, {{i + 1, 1.0}, {i + 2, 1.0}}, Relation::Equal, 1);
  for (int i = 0; i < 9; ++i)
    m.add_indicator(i, false, {{i + 1, 1.0}, {i + 2, 1.0}, {i + 3, 1.0}}, Relation::LessEq, 2);
  const MilpModel lin = linearize_indicators(m);
  int count = 0;
  for_each_point(m, [&](const std::vector<double>& pt) {
    const bool a = feasible_with_indicators(m, pt);
    CHECK(a == feasible_with_indicators(lin, pt));
    count += a;
  });
  CHECK(count > 0);
}

TEST_CASE("unbounded indicator variables are rejected") {
  MilpModel m;
  const VarId g = m.add_binary("g");
  const VarId x = m.add_variable("x", VarKind::Continuous, 0, INFINITY);
  m.add_indicator(g, true, {{x, 1.0}}, Relation::LessEq, 1);
  CHECK_THROWS_AS(linearize_indicators(m), ModelError);
}

TEST_CASE("pure LP matches vertex enumeration") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    MilpModel m;
    const int n = 3;
    for (int i = 0; i < n; ++i) m.add_variable("x" + std::to_string(i), VarKind::Continuous, -5, 5);
    for (int r = 0; r < 5; ++r) {
      std::vector<Term> t;
      for (int i = 0; i < n; ++i) t.push_back({i, u(rng)});
      m.add_constraint(t, r % 2 ? Relation::LessEq : Relation::GreaterEq, u(rng));
    }
    std::vector<Term> obj;
    for (int i = 0; i < n; ++i) obj.push_back({i, u(rng)});
    m.set_objective(obj, 1.5);
    const double expect = vertex_enumeration(m);
    const SolveOutcome out = solve(m);
    if (std::isinf(expect)) {
      CHECK(out.status == SolveStatus::Infeasible);
    } else {
      REQUIRE(out.status == SolveStatus::Optimal);
      CHECK(out.objective == doctest::Approx(expect).epsilon(1e-7));
    }
  }
}

TEST_CASE("small integer program matches brute force") {
  // Knapsack with an indicator: item 0 taken forces item 1.
  const double w[] = {3, 4, 5, 2, 7, 1};
  const double v[] = {4, 5, 7, 3, 9, 1};
  MilpModel m;
  std::vector<Term> weight, value;
  for (int i = 0; i < 6; ++i) {
    m.add_binary("x" + std::to_string(i));
    weight.push_back({i, w[i]});
    value.push_back({i, -v[i]});
  }
  m.add_constraint(weight, Relation::LessEq, 12);
  m.add_indicator(0, true, {{1, 1.0}}, Relation::Equal, 1);
  m.set_objective(value);
  double best = 0.0;
  for_each_point(m, [&](const std::vector<double>& pt) {
    if (feasible_with_indicators(m, pt)) best = std::min(best, activity(m.objective(), pt));
  });
  const SolveOutcome out = solve(m);
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(out.objective == doctest::Approx(best));
  for (VarId i = 0; i < 6; ++i) CHECK(out.value(i) == std::round(out.value(i)));
}

TEST_CASE("relaxed integers are solved as continuous") {
  MilpModel m;
  const VarId x = m.add_variable("x", VarKind::Integer, 0, 10);
  m.add_constraint({{x, 2.0}}, Relation::GreaterEq, 3);
  m.set_objective({{x, 1.0}});
  CHECK(solve(m).objective == doctest::Approx(2.0));
  SolveOptions o;
  o.relax = {x};
  CHECK(solve(m, o).objective == doctest::Approx(1.5));
}

TEST_CASE("infeasible and malformed models") {
  MilpModel m;
  const VarId x = m.add_variable("x", VarKind::Integer, 0, 1);
  m.add_constraint({{x, 1.0}}, Relation::Equal, 0.5);
  CHECK(solve(m).status == SolveStatus::Infeasible);

  MilpModel bad;
  bad.add_variable("x", VarKind::Continuous, 0, 1);
  bad.add_constraint({{3, 1.0}}, Relation::LessEq, 1);
  CHECK_THROWS_AS(bad.check(), ModelError);
  MilpModel guard;
  const VarId c = guard.add_variable("c", VarKind::Continuous, 0, 1);
  guard.add_indicator(c, true, {{c, 1.0}}, Relation::LessEq, 0);
  CHECK_THROWS_AS(guard.check(), ModelError);
  CHECK_THROWS_AS(make_backend("nope"), BackendError);
}

TEST_CASE("LP export names every section") {
  MilpModel m;
  const VarId b = m.add_binary("b");
  const VarId y = m.add_variable("y", VarKind::Integer, -2, 3);
  const VarId z = m.add_variable("z", VarKind::Continuous, 0, 1);
  m.add_constraint({{b, 1.0}, {y, 2.0}, {z, -1.0}}, Relation::GreaterEq, 0, "row");
  m.add_indicator(b, true, {{y, 1.0}}, Relation::LessEq, 1, "ind");
  m.set_objective({{y, 1.0}});
  const std::string lp = to_lp_format(m);
  for (const char* s : {"Minimize", "Subject To", "Bounds", "General", "Binary", "End", "->"})
    CHECK(lp.find(s) != std::string::npos);
}
