#include <chrono>
#include <cmath>

#include "Highs.h"
#include "mlfir/milp.hpp"

namespace mlfir::milp {

namespace {

class HighsBackend final : public Backend {
 public:
  std::string name() const override { return "highs"; }
  bool supports_indicators() const override { return false; }

  SolveOutcome solve(const MilpModel& model, const SolveOptions& options) const override {
    const auto start = std::chrono::steady_clock::now();
    Highs highs;
    highs.setOptionValue("output_flag", options.verbose);
    highs.setOptionValue("threads", options.threads);
    highs.setOptionValue("random_seed", options.seed);
    highs.setOptionValue("mip_rel_gap", options.mip_rel_gap);
    // Tight integrality so indicator big-M rows cannot leak through a
    // fractional guard.
    highs.setOptionValue("mip_feasibility_tolerance", 1e-9);
    highs.setOptionValue("primal_feasibility_tolerance", 1e-9);
    if (options.integral_objective) highs.setOptionValue("mip_abs_gap", 1.0 - 1e-6);
    if (options.time_limit) highs.setOptionValue("time_limit", *options.time_limit);

    const int n = model.num_variables();
    HighsLp lp;
    lp.num_col_ = n;
    lp.num_row_ = static_cast<HighsInt>(model.constraints().size());
    lp.sense_ = ObjSense::kMinimize;
    lp.offset_ = model.objective_constant();
    lp.col_cost_.assign(static_cast<std::size_t>(n), 0.0);
    lp.col_lower_.resize(static_cast<std::size_t>(n));
    lp.col_upper_.resize(static_cast<std::size_t>(n));
    lp.integrality_.assign(static_cast<std::size_t>(n), HighsVarType::kContinuous);
    bool any_integer = false;
    for (VarId id = 0; id < n; ++id) {
      const Variable& v = model.variable(id);
      const auto k = static_cast<std::size_t>(id);
      lp.col_lower_[k] = std::isinf(v.lo) ? -kHighsInf : v.lo;
      lp.col_upper_[k] = std::isinf(v.hi) ? kHighsInf : v.hi;
      if (v.kind != VarKind::Continuous && !options.relax.contains(id)) {
        lp.integrality_[k] = HighsVarType::kInteger;
        any_integer = true;
      }
    }
    for (const Term& t : model.objective()) lp.col_cost_[static_cast<std::size_t>(t.var)] += t.coeff;
    if (!any_integer) lp.integrality_.clear();

    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.num_col_ = n;
    lp.a_matrix_.num_row_ = lp.num_row_;
    lp.a_matrix_.start_.assign(1, 0);
    for (const LinearConstraint& c : model.constraints()) {
      for (const Term& t : c.terms) {
        if (t.coeff == 0.0) continue;
        lp.a_matrix_.index_.push_back(t.var);
        lp.a_matrix_.value_.push_back(t.coeff);
      }
      lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
      lp.row_lower_.push_back(c.rel == Relation::LessEq ? -kHighsInf : c.rhs);
      lp.row_upper_.push_back(c.rel == Relation::GreaterEq ? kHighsInf : c.rhs);
    }

    if (highs.passModel(std::move(lp)) == HighsStatus::kError) throw BackendError("HiGHS rejected the model");
    if (highs.run() == HighsStatus::kError) {
      // An error return still leaves a model status worth reporting for
      // infeasible or unbounded instances.
      const HighsModelStatus st = highs.getModelStatus();
      if (st != HighsModelStatus::kInfeasible && st != HighsModelStatus::kUnbounded &&
          st != HighsModelStatus::kUnboundedOrInfeasible)
        throw BackendError("HiGHS failed: " + highs.modelStatusToString(st));
    }

    SolveOutcome out;
    const HighsInfo& info = highs.getInfo();
    const bool has_primal = info.primal_solution_status == kSolutionStatusFeasible;
    switch (highs.getModelStatus()) {
      case HighsModelStatus::kOptimal:
      case HighsModelStatus::kModelEmpty:
        out.status = SolveStatus::Optimal;
        break;
      case HighsModelStatus::kInfeasible:
        out.status = SolveStatus::Infeasible;
        break;
      case HighsModelStatus::kUnbounded:
      case HighsModelStatus::kUnboundedOrInfeasible:
        out.status = SolveStatus::Unbounded;
        break;
      case HighsModelStatus::kTimeLimit:
      case HighsModelStatus::kIterationLimit:
      case HighsModelStatus::kInterrupt:
      case HighsModelStatus::kHighsInterrupt:
      case HighsModelStatus::kMemoryLimit:
        out.status = SolveStatus::TimedOut;
        break;
      case HighsModelStatus::kSolutionLimit:
      case HighsModelStatus::kObjectiveBound:
      case HighsModelStatus::kObjectiveTarget:
        out.status = has_primal ? SolveStatus::Feasible : SolveStatus::TimedOut;
        break;
      default:
        throw BackendError("HiGHS ended with status " + highs.modelStatusToString(highs.getModelStatus()));
    }
    const bool carries = out.status == SolveStatus::Optimal || out.status == SolveStatus::Feasible ||
                         (out.status == SolveStatus::TimedOut && has_primal);
    if (carries) {
      out.solution = true;
      out.assignment = highs.getSolution().col_value;
      out.assignment.resize(static_cast<std::size_t>(n));
      out.objective = info.objective_function_value;
      out.gap = any_integer ? std::max(0.0, info.mip_gap) : 0.0;
      if (n == 0) out.objective = model.objective_constant();
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }
};

}  // namespace

std::unique_ptr<Backend> make_backend(const std::string& name) {
  if (name == "highs") return std::make_unique<HighsBackend>();
  throw BackendError("solver backend '" + name + "' is not available (built-in: highs)");
}

std::vector<std::string> available_backends() { return {"highs"}; }

}  // namespace mlfir::milp
