#pragma once

// Pieces shared by the two ILP formulations.

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mlfir/filter_spec.hpp"
#include "mlfir/method_result.hpp"
#include "mlfir/milp.hpp"

namespace mlfir::detail {

/// Saving in structural adders when coefficient m is zero.
inline std::vector<double> structural_weights(const FilterSpec& spec) {
  const int M = spec.coefficient_count();
  std::vector<double> w(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    std::vector<bool> flags(static_cast<std::size_t>(M), false);
    flags[static_cast<std::size_t>(m)] = true;
    w[static_cast<std::size_t>(m)] = spec.order - structural_adder_count(spec.type, spec.order, flags);
  }
  return w;
}

inline std::int64_t rounded(const milp::SolveOutcome& out, milp::VarId id) {
  return static_cast<std::int64_t>(std::llround(out.value(id)));
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline std::string describe(const std::string& what, const milp::SolveOutcome& out) {
  std::ostringstream s;
  s << what << ": " << milp::to_string(out.status);
  if (out.has_solution()) s << " obj=" << out.objective;
  s.precision(3);
  s << " (" << std::fixed << out.wall_time << " s)";
  return s.str();
}

}  // namespace mlfir::detail
