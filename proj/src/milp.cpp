#include "mlfir/milp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mlfir::milp {

namespace {

const char* relation_symbol(Relation rel) {
  switch (rel) {
    case Relation::LessEq: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEq: return ">=";
  }
  return "?";
}

// Range of sum(terms) over the variable box.
std::pair<double, double> activity_range(const MilpModel& model, const std::vector<Term>& terms) {
  double lo = 0.0;
  double hi = 0.0;
  for (const Term& t : terms) {
    const Variable& v = model.variable(t.var);
    if (t.coeff > 0.0) {
      lo += t.coeff * v.lo;
      hi += t.coeff * v.hi;
    } else if (t.coeff < 0.0) {
      lo += t.coeff * v.hi;
      hi += t.coeff * v.lo;
    }
  }
  return {lo, hi};
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::TimedOut: return "timed-out";
  }
  return "?";
}

VarId MilpModel::add_variable(std::string name, VarKind kind, double lo, double hi) {
  if (kind == VarKind::Binary) {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
  }
  vars_.push_back({std::move(name), kind, lo, hi});
  return static_cast<VarId>(vars_.size() - 1);
}

void MilpModel::add_constraint(std::vector<Term> terms, Relation rel, double rhs, std::string name) {
  rows_.push_back({std::move(terms), rel, rhs, std::move(name)});
}

void MilpModel::add_indicator(VarId guard, bool guard_value, std::vector<Term> terms, Relation rel,
                              double rhs, std::string name) {
  indicators_.push_back({guard, guard_value, {std::move(terms), rel, rhs, std::move(name)}});
}

void MilpModel::fix(VarId var, double value) {
  Variable& v = vars_.at(static_cast<std::size_t>(var));
  v.lo = value;
  v.hi = value;
}

void MilpModel::set_objective(std::vector<Term> terms, double constant) {
  objective_ = std::move(terms);
  objective_constant_ = constant;
}

void MilpModel::check_terms(const std::vector<Term>& terms, const std::string& where) const {
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_variables())
      throw ModelError(where + " references unknown variable " + std::to_string(t.var));
    if (!std::isfinite(t.coeff)) throw ModelError(where + " has a non-finite coefficient");
  }
}

void MilpModel::check() const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].lo > vars_[i].hi)
      throw ModelError("variable " + vars_[i].name + " has inverted bounds");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) check_terms(rows_[i].terms, "constraint " + std::to_string(i));
  for (std::size_t i = 0; i < indicators_.size(); ++i) {
    const IndicatorConstraint& ind = indicators_[i];
    const std::string where = "indicator " + std::to_string(i);
    if (ind.guard < 0 || ind.guard >= num_variables()) throw ModelError(where + " has an unknown guard");
    if (variable(ind.guard).kind != VarKind::Binary) throw ModelError(where + " guard is not binary");
    check_terms(ind.implied.terms, where);
    for (const Term& t : ind.implied.terms) {
      if (t.var == ind.guard) throw ModelError(where + " uses its guard inside the implied constraint");
    }
  }
  check_terms(objective_, "objective");
}

MilpModel linearize_indicators(const MilpModel& model) {
  model.check();
  // Rebuild without indicators, keeping variables, rows and objective.
  MilpModel result;
  for (const Variable& v : model.variables()) result.add_variable(v.name, v.kind, v.lo, v.hi);
  for (const LinearConstraint& row : model.constraints()) result.add_constraint(row.terms, row.rel, row.rhs, row.name);
  result.set_objective(model.objective(), model.objective_constant());

  for (const IndicatorConstraint& ind : model.indicators()) {
    const auto [act_lo, act_hi] = activity_range(model, ind.implied.terms);
    const LinearConstraint& c = ind.implied;
    const bool need_upper = c.rel != Relation::GreaterEq;
    const bool need_lower = c.rel != Relation::LessEq;

    // [guard = value] as an affine expression: active = g or 1 - g.
    // Upper side: a'x <= c + M (1 - active).
    if (need_upper) {
      if (!std::isfinite(act_hi))
        throw ModelError("indicator '" + c.name + "' has an unbounded variable; cannot derive big-M");
      const double big_m = act_hi - c.rhs;
      if (big_m > 0.0) {
        std::vector<Term> terms = c.terms;
        if (ind.guard_value) {
          terms.push_back({ind.guard, big_m});
          result.add_constraint(std::move(terms), Relation::LessEq, c.rhs + big_m, c.name + "_ub");
        } else {
          terms.push_back({ind.guard, -big_m});
          result.add_constraint(std::move(terms), Relation::LessEq, c.rhs, c.name + "_ub");
        }
      }
    }
    // Lower side: a'x >= c - M (1 - active).
    if (need_lower) {
      if (!std::isfinite(act_lo))
        throw ModelError("indicator '" + c.name + "' has an unbounded variable; cannot derive big-M");
      const double big_m = c.rhs - act_lo;
      if (big_m > 0.0) {
        std::vector<Term> terms = c.terms;
        if (ind.guard_value) {
          terms.push_back({ind.guard, -big_m});
          result.add_constraint(std::move(terms), Relation::GreaterEq, c.rhs - big_m, c.name + "_lb");
        } else {
          terms.push_back({ind.guard, big_m});
          result.add_constraint(std::move(terms), Relation::GreaterEq, c.rhs, c.name + "_lb");
        }
      }
    }
  }
  return result;
}

std::string to_lp_format(const MilpModel& model) {
  std::ostringstream out;
  out.precision(17);
  auto var_name = [&](VarId id) {
    const std::string& n = model.variable(id).name;
    return n.empty() ? "x" + std::to_string(id) : n + "#" + std::to_string(id);
  };
  auto write_terms = [&](const std::vector<Term>& terms) {
    if (terms.empty()) {
      out << " 0 " << var_name(0);
      return;
    }
    for (const Term& t : terms) out << (t.coeff < 0 ? " - " : " + ") << std::abs(t.coeff) << ' ' << var_name(t.var);
  };

  out << "\\* generated by mlfir *\\\n";
  out << "Minimize\n obj:";
  if (model.objective().empty() && model.num_variables() > 0)
    out << " 0 " << var_name(0);
  else
    for (const Term& t : model.objective()) out << (t.coeff < 0 ? " - " : " + ") << std::abs(t.coeff) << ' ' << var_name(t.var);
  if (model.objective_constant() != 0.0) out << " + " << model.objective_constant() << " __const";
  out << "\nSubject To\n";
  int row = 0;
  for (const LinearConstraint& c : model.constraints()) {
    out << ' ' << (c.name.empty() ? "c" + std::to_string(row) : c.name + "#" + std::to_string(row)) << ':';
    write_terms(c.terms);
    out << ' ' << relation_symbol(c.rel) << ' ' << c.rhs << '\n';
    ++row;
  }
  int ind_row = 0;
  for (const IndicatorConstraint& ind : model.indicators()) {
    out << " ind" << ind_row++ << ": " << var_name(ind.guard) << " = " << (ind.guard_value ? 1 : 0) << " ->";
    write_terms(ind.implied.terms);
    out << ' ' << relation_symbol(ind.implied.rel) << ' ' << ind.implied.rhs << '\n';
  }
  out << "Bounds\n";
  for (VarId id = 0; id < model.num_variables(); ++id) {
    const Variable& v = model.variable(id);
    if (v.kind == VarKind::Binary && v.lo == 0.0 && v.hi == 1.0) continue;
    out << ' ';
    if (std::isinf(v.lo)) out << "-inf";
    else out << v.lo;
    out << " <= " << var_name(id) << " <= ";
    if (std::isinf(v.hi)) out << "+inf";
    else out << v.hi;
    out << '\n';
  }
  if (model.objective_constant() != 0.0) out << " __const = 1\n";
  bool header = false;
  for (VarId id = 0; id < model.num_variables(); ++id) {
    if (model.variable(id).kind != VarKind::Integer) continue;
    if (!header) out << "General\n";
    header = true;
    out << ' ' << var_name(id) << '\n';
  }
  header = false;
  for (VarId id = 0; id < model.num_variables(); ++id) {
    if (model.variable(id).kind != VarKind::Binary) continue;
    if (!header) out << "Binary\n";
    header = true;
    out << ' ' << var_name(id) << '\n';
  }
  out << "End\n";
  return out.str();
}

SolveOutcome solve(const MilpModel& model, const SolveOptions& options) {
  model.check();
  const auto backend = make_backend(options.backend);
  SolveOutcome outcome = backend->supports_indicators() || model.indicators().empty()
                             ? backend->solve(model, options)
                             : backend->solve(linearize_indicators(model), options);
  if (outcome.has_solution()) {
    for (VarId id = 0; id < model.num_variables(); ++id) {
      if (model.variable(id).kind == VarKind::Continuous || options.relax.contains(id)) continue;
      double& x = outcome.assignment[static_cast<std::size_t>(id)];
      x = std::round(x);
    }
  }
  return outcome;
}

}  // namespace mlfir::milp
