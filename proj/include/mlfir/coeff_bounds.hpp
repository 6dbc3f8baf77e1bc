#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlfir/filter_spec.hpp"
#include "mlfir/freq_grid.hpp"
#include "mlfir/milp.hpp"

namespace mlfir {

/// The specification cannot be met even with real-valued coefficients.
class SpecInfeasible : public SpecError {
 public:
  using SpecError::SpecError;
};

/// The real relaxation is feasible but no integer design exists.
class IntegerInfeasible : public SpecError {
 public:
  using SpecError::SpecError;
};

struct CoefficientBounds {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;

  std::size_t size() const { return lo.size(); }
  bool contains(std::span<const std::int64_t> coefficients) const;
  /// Elementwise intersection; throws IntegerInfeasible if it empties a range.
  CoefficientBounds intersect(const CoefficientBounds& other) const;
  bool operator==(const CoefficientBounds&) const = default;

  std::string to_csv() const;
};

/// The word-length box [-(2^B - 1), 2^B - 1] for every coefficient.
CoefficientBounds box_bounds(const FilterSpec& spec);

/// Per-coefficient LP projection of the discretized feasibility region.
/// Bounds are rounded inward after a 1e-6 outward nudge. When `previous` is
/// given the result is intersected with it. Throws SpecInfeasible when the
/// real relaxation has no solution and IntegerInfeasible when a range holds
/// no integer.
CoefficientBounds tighten(const FilterSpec& spec, const FrequencyGrid& grid,
                          const CoefficientBounds* previous = nullptr,
                          const milp::SolveOptions& options = {});

/// Variables shared by both ILP formulations: h'_m and the gain.
struct ResponseVars {
  std::vector<milp::VarId> h;
  milp::VarId gain = -1;  // -1 when the gain is fixed

  bool gain_is_variable() const { return gain >= 0; }
};

/// Adds h'_m in [lo_m, hi_m] (kind `h_kind`), the gain variable for a
/// variable-gain spec, and two response rows per grid point. `margin` is
/// subtracted from both sides of every row in integer-scaled units.
ResponseVars add_response_rows(milp::MilpModel& model, const FilterSpec& spec, const FrequencyGrid& grid,
                               const CoefficientBounds& bounds, milp::VarKind h_kind, double margin);

}  // namespace mlfir
