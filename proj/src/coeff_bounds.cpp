#include "mlfir/coeff_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mlfir {

namespace {

constexpr double kRoundingSlack = 1e-6;
// Basis values below this are treated as exact zeros (e.g. type II at pi).
constexpr double kBasisZero = 1e-12;

}  // namespace

bool CoefficientBounds::contains(std::span<const std::int64_t> coefficients) const {
  if (coefficients.size() != lo.size()) return false;
  for (std::size_t m = 0; m < lo.size(); ++m) {
    if (coefficients[m] < lo[m] || coefficients[m] > hi[m]) return false;
  }
  return true;
}

CoefficientBounds CoefficientBounds::intersect(const CoefficientBounds& other) const {
  if (other.size() != size()) throw SpecError("coefficient bound vectors differ in length");
  CoefficientBounds out = *this;
  for (std::size_t m = 0; m < lo.size(); ++m) {
    out.lo[m] = std::max(lo[m], other.lo[m]);
    out.hi[m] = std::min(hi[m], other.hi[m]);
    if (out.lo[m] > out.hi[m])
      throw IntegerInfeasible("coefficient " + std::to_string(m) + " has an empty integer range");
  }
  return out;
}

std::string CoefficientBounds::to_csv() const {
  std::ostringstream out;
  out << "m,lo,hi\n";
  for (std::size_t m = 0; m < lo.size(); ++m) out << m << ',' << lo[m] << ',' << hi[m] << '\n';
  return out.str();
}

CoefficientBounds box_bounds(const FilterSpec& spec) {
  const auto M = static_cast<std::size_t>(spec.coefficient_count());
  return {std::vector<std::int64_t>(M, -spec.max_magnitude()), std::vector<std::int64_t>(M, spec.max_magnitude())};
}

ResponseVars add_response_rows(milp::MilpModel& model, const FilterSpec& spec, const FrequencyGrid& grid,
                               const CoefficientBounds& bounds, milp::VarKind h_kind, double margin) {
  using milp::Relation;
  using milp::Term;
  const int M = spec.coefficient_count();
  if (static_cast<int>(bounds.size()) != M) throw SpecError("coefficient bounds do not match the filter");

  ResponseVars vars;
  for (int m = 0; m < M; ++m) {
    const auto k = static_cast<std::size_t>(m);
    vars.h.push_back(model.add_variable("h" + std::to_string(m), h_kind, static_cast<double>(bounds.lo[k]),
                                        static_cast<double>(bounds.hi[k])));
  }
  if (!spec.gain.is_fixed()) vars.gain = model.add_variable("G", milp::VarKind::Continuous, spec.gain.lo, spec.gain.hi);

  const double scale = spec.scale();
  int row = 0;
  for (const GridPoint& p : grid.points()) {
    std::vector<Term> terms;
    for (int m = 0; m < M; ++m) {
      const double c = basis_eval(spec.type, m, p.omega());
      if (std::abs(c) > kBasisZero) terms.push_back({vars.h[static_cast<std::size_t>(m)], c});
    }
    const std::string tag = "resp" + std::to_string(row++);
    if (vars.gain_is_variable()) {
      // sum h c - G 2^B D >= 0 and <= 0 respectively.
      auto lower = terms;
      lower.push_back({vars.gain, -scale * p.lower});
      model.add_constraint(std::move(lower), Relation::GreaterEq, margin, tag + "_lo");
      auto upper = std::move(terms);
      upper.push_back({vars.gain, -scale * p.upper});
      model.add_constraint(std::move(upper), Relation::LessEq, -margin, tag + "_hi");
    } else {
      const double g = spec.gain.value() * scale;
      model.add_constraint(terms, Relation::GreaterEq, g * p.lower + margin, tag + "_lo");
      model.add_constraint(std::move(terms), Relation::LessEq, g * p.upper - margin, tag + "_hi");
    }
  }
  return vars;
}

CoefficientBounds tighten(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds* previous,
                          const milp::SolveOptions& options) {
  if (grid.empty()) throw SpecError("cannot tighten coefficient bounds on an empty grid");
  const int M = spec.coefficient_count();
  const CoefficientBounds box = box_bounds(spec);

  milp::MilpModel model;
  const ResponseVars vars = add_response_rows(model, spec, grid, box, milp::VarKind::Continuous, 0.0);

  milp::SolveOptions lp_options = options;
  lp_options.relax.clear();
  lp_options.integral_objective = false;

  CoefficientBounds out = box;
  for (int m = 0; m < M; ++m) {
    const auto k = static_cast<std::size_t>(m);
    for (const double sense : {1.0, -1.0}) {
      model.set_objective({{vars.h[k], sense}});
      const milp::SolveOutcome res = milp::solve(model, lp_options);
      if (res.status == milp::SolveStatus::Infeasible)
        throw SpecInfeasible("the specification cannot be met even with real-valued coefficients");
      if (res.status == milp::SolveStatus::Unbounded) continue;  // box edge stays
      if (!res.has_solution())
        throw milp::BackendError(std::string("bound LP ended as ") + milp::to_string(res.status));
      const double value = res.value(vars.h[k]);
      if (sense > 0)
        out.lo[k] = std::max(out.lo[k], static_cast<std::int64_t>(std::ceil(value - kRoundingSlack)));
      else
        out.hi[k] = std::min(out.hi[k], static_cast<std::int64_t>(std::floor(value + kRoundingSlack)));
    }
    if (out.lo[k] > out.hi[k])
      throw IntegerInfeasible("coefficient " + std::to_string(m) + " admits no integer inside the word-length box");
  }
  return previous != nullptr ? out.intersect(*previous) : out;
}

}  // namespace mlfir
