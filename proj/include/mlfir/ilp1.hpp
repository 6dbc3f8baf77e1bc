#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "mlfir/adder_graph.hpp"
#include "mlfir/coeff_bounds.hpp"
#include "mlfir/freq_grid.hpp"
#include "mlfir/method_result.hpp"
#include "mlfir/milp.hpp"

namespace mlfir {

struct ShiftRange {
  int min = 0;
  int max = 0;

  /// [-(B+1), B+1].
  static ShiftRange for_wordlength(int wordlength) { return {-(wordlength + 1), wordlength + 1}; }
};

struct Ilp1Options {
  milp::SolveOptions solve;  // time_limit is the budget of the whole method
  bool relax = true;  // integer auxiliaries continuous
  double margin = 1e-6;
  std::optional<ShiftRange> shifts;  // default from the word length
};

/// One adder of the fixed-size multiplier block, inputs indexed 0 = left, 1 = right.
struct Ilp1Adder {
  milp::VarId value = -1;  // c_a
  milp::VarId half = -1;  // c_a = 2 half + 1
  std::array<milp::VarId, 2> input{-1, -1};  // c_{a,i}
  std::array<milp::VarId, 2> shifted{-1, -1};  // c^sh_{a,i}
  std::array<milp::VarId, 2> signed_{-1, -1};  // c^{sh,sg}_{a,i}
  std::array<std::vector<milp::VarId>, 2> source;  // c_{a,i,k}, k = 0..a-1
  std::array<std::map<int, milp::VarId>, 2> shift;  // varphi_{a,i,s}
  std::array<milp::VarId, 2> negate{-1, -1};  // phi_{a,i}
};

struct Ilp1Instance {
  int adders = 0;  // A_M
  int wordlength = 0;
  ShiftRange shifts;
  milp::MilpModel model;
  ResponseVars response;
  std::vector<milp::VarId> zero;  // h_{m,0}, -1 when zero is outside the bounds
  std::vector<Ilp1Adder> block;  // index a-1 for adder a
  // o_{a,m,s,phi}
  std::map<std::tuple<int, int, int, int>, milp::VarId> output;
  std::set<milp::VarId> relaxable;
};

/// Filter build for a fixed number of multiplier-block adders.
Ilp1Instance build_ilp1(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                        int adders, ShiftRange shifts, double margin = 1e-6);
/// Constant-multiplication build: h'_m fixed, no response rows, feasibility only.
Ilp1Instance build_ilp1_targets(const std::vector<std::int64_t>& targets, int wordlength, int adders,
                                ShiftRange shifts);
/// Only response rows, coefficient bounds and zero indicators; minimizes A_S.
Ilp1Instance build_sparse(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                          double margin = 1e-6);

struct FixedAmResult {
  milp::SolveOutcome outcome;
  std::optional<DesignSolution> solution;
};

FixedAmResult solve_fixed_am(const FilterSpec& spec, const Ilp1Instance& instance, const Ilp1Options& options);

/// Graph from a solved instance; simulate-verified.
AdderGraph extract_from_ilp1(const Ilp1Instance& instance, const milp::SolveOutcome& outcome);

/// Outer search over A_M = 0, 1, ... with the sparse lower bound and the
/// dominance stop rule.
MethodResult minimize_total_adders(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                                   const Ilp1Options& options = {});

/// Fewest adders realizing all targets (constant multiplication only).
struct McmResult {
  AdderGraph graph;
  MethodStatus status = MethodStatus::Optimal;
};
McmResult minimal_mcm(const std::vector<std::int64_t>& targets, const Ilp1Options& options = {});

}  // namespace mlfir
