#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlfir/adder_graph.hpp"

namespace mlfir {

enum class MethodStatus { Optimal, BestKnown, Infeasible, TimedOut };

const char* to_string(MethodStatus s);

/// Outcome of one optimization method on a fixed grid and fixed bounds.
struct MethodResult {
  MethodStatus status = MethodStatus::Infeasible;
  std::optional<DesignSolution> solution;  // set for Optimal and BestKnown
  std::vector<std::string> log;  // one line per solver call
  double seconds = 0.0;
};

}  // namespace mlfir
