#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mlfir::milp {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using VarId = int;

enum class VarKind { Binary, Integer, Continuous };
enum class Relation { LessEq, Equal, GreaterEq };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lo = 0.0;
  double hi = 0.0;
};

struct Term {
  VarId var = -1;
  double coeff = 0.0;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
  std::string name;
};

/// guard == guard_value  =>  implied holds.
struct IndicatorConstraint {
  VarId guard = -1;
  bool guard_value = true;
  LinearConstraint implied;
};

/// Solver-agnostic mixed-integer model (minimization).
class MilpModel {
 public:
  VarId add_variable(std::string name, VarKind kind, double lo, double hi);
  VarId add_binary(std::string name) { return add_variable(std::move(name), VarKind::Binary, 0.0, 1.0); }

  void add_constraint(std::vector<Term> terms, Relation rel, double rhs, std::string name = {});
  void add_indicator(VarId guard, bool guard_value, std::vector<Term> terms, Relation rel, double rhs,
                     std::string name = {});
  /// Fixes a variable by collapsing its bounds.
  void fix(VarId var, double value);

  void set_objective(std::vector<Term> terms, double constant = 0.0);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<LinearConstraint>& constraints() const { return rows_; }
  const std::vector<IndicatorConstraint>& indicators() const { return indicators_; }
  const std::vector<Term>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  const Variable& variable(VarId id) const { return vars_.at(static_cast<std::size_t>(id)); }

  /// Throws ModelError when a constraint references an unknown variable, an
  /// indicator guard is not binary, or bounds are inverted.
  void check() const;

 private:
  void check_terms(const std::vector<Term>& terms, const std::string& where) const;

  std::vector<Variable> vars_;
  std::vector<LinearConstraint> rows_;
  std::vector<IndicatorConstraint> indicators_;
  std::vector<Term> objective_;
  double objective_constant_ = 0.0;
};

/// Replaces every indicator by big-M inequalities whose M is the tightest
/// value implied by the variable bounds (sup(a'x) - c per side). Equalities
/// are split. Throws ModelError when a needed bound is infinite.
MilpModel linearize_indicators(const MilpModel& model);

/// Writes the model in CPLEX LP text format.
std::string to_lp_format(const MilpModel& model);

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, TimedOut };

const char* to_string(SolveStatus status);

struct SolveOptions {
  std::optional<double> time_limit;  // seconds
  int threads = 1;
  int seed = 0;
  std::set<VarId> relax;  // integer variables solved as continuous
  std::string backend = "highs";
  bool verbose = false;
  double mip_rel_gap = 0.0;
  // Objective takes integer values only; lets the backend stop once the
  // bound gap drops below one.
  bool integral_objective = false;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  bool solution = false;  // assignment is meaningful
  std::vector<double> assignment;
  double objective = 0.0;
  double gap = 0.0;
  double wall_time = 0.0;

  bool has_solution() const { return solution; }
  double value(VarId id) const { return assignment.at(static_cast<std::size_t>(id)); }
  bool is_set(VarId id) const { return value(id) > 0.5; }
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual bool supports_indicators() const = 0;
  /// Receives a model without indicators when supports_indicators() is false.
  virtual SolveOutcome solve(const MilpModel& model, const SolveOptions& options) const = 0;
};

/// Throws BackendError for an unknown name.
std::unique_ptr<Backend> make_backend(const std::string& name);
std::vector<std::string> available_backends();

/// Solves with the backend named in the options. Integer and binary values in
/// the returned assignment are rounded to the nearest integer.
SolveOutcome solve(const MilpModel& model, const SolveOptions& options = {});

}  // namespace mlfir::milp
