#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlfir/adder_graph.hpp"
#include "mlfir/coeff_bounds.hpp"
#include "mlfir/freq_grid.hpp"
#include "mlfir/ilp2.hpp"
#include "mlfir/milp.hpp"

namespace mlfir {

/// Responses this close to a bound count as meeting it (normalized units).
inline constexpr double kValidationTolerance = 1e-12;

struct BandWorst {
  int band = 0;
  double omega_pi = 0.0;
  double violation = 0.0;  // > 0 only where the bound is broken
  int side = 0;  // -1 lower bound broken, +1 upper bound broken, 0 none
};

struct ValidationReport {
  double max_violation = 0.0;
  double omega_max_pi = 0.0;
  int band_max = -1;
  int side_max = 0;
  std::vector<BandWorst> band_worst;  // one entry per band
  std::size_t points = 0;

  bool valid() const { return max_violation == 0.0; }
};

/// Default dense-check size: max(128 M, 10 * design grid size).
std::size_t default_density(const FilterSpec& spec, std::size_t design_grid_size = 0);

/// Dense uniform check (plus band edges and refined local extrema of H) of
/// the normalized response H / (G 2^B) against the bounds of `spec`.
ValidationReport validate(const FilterSpec& spec, std::span<const std::int64_t> coefficients, double gain,
                          std::size_t density);

/// Interval of gains for which the coefficients meet every bound on the
/// dense grid, intersected with the gain mode; nullopt when empty.
std::optional<std::pair<double, double>> feasible_gain_interval(const FilterSpec& spec,
                                                                std::span<const std::int64_t> coefficients,
                                                                std::size_t density);

struct GainAdjustment {
  bool improved = false;
  double gain = 1.0;
  ValidationReport report;
};

/// Rescales G toward H(w_max) / (2^B D(w_max)); falls back to the exact
/// feasible interval when the single rescale leaves a violation. A fixed gain
/// never changes.
GainAdjustment adjust_gain(const FilterSpec& spec, std::span<const std::int64_t> coefficients, double gain,
                           const ValidationReport& report, std::size_t density);

/// Best completion of a coefficient list with exactly one tap missing: the
/// position and integer value (within the word-length box) that minimize the
/// violation. Its violation is a lower bound for every completion. Uses the
/// convexity of the violation in a single coefficient.
struct Completion {
  std::vector<std::int64_t> coefficients;  // basis order
  std::size_t position = 0;  // basis index of the inserted tap
  double lower_bound = 0.0;  // least dense-grid violation over all completions
  ValidationReport report;  // full check of the chosen completion
};

Completion least_violation_completion(const FilterSpec& spec, std::span<const std::int64_t> partial, double gain,
                                      std::size_t density);

enum class Method { Ilp1Total, Ilp2 };

struct DesignOptions {
  Method method = Method::Ilp2;
  std::optional<int> depth = 2;  // ILP2 budget; nullopt = search 1..max
  int grid_k = 4;  // initial AFP points per coefficient
  int afp_factor = 16;
  bool force_edges = true;
  int max_iterations = 50;
  std::size_t density = 0;  // 0 = default_density
  milp::SolveOptions solve;  // time_limit is the budget of the whole design
  bool relax = true;
  double margin = 1e-6;
  StageSetOptions stage_sets;
};

enum class DesignStatus { Optimal, BestKnown, SpecInfeasible, IntegerInfeasible, Diverged, TimedOut };

const char* to_string(DesignStatus s);

struct DesignOutcome {
  DesignStatus status = DesignStatus::Diverged;
  std::optional<DesignSolution> solution;
  std::optional<ValidationReport> report;  // against the original bounds
  FrequencyGrid grid;  // final design grid
  std::optional<CoefficientBounds> bounds;
  std::vector<std::string> log;
  int iterations = 0;
  double seconds = 0.0;
  std::string message;
};

DesignOutcome design(const FilterSpec& spec, const DesignOptions& options = {});

/// Writes solution.json, graph.dot, response.csv and log.txt into `dir`.
void write_bundle(const std::string& dir, const FilterSpec& spec, const DesignOutcome& outcome,
                  std::size_t density = 0);

}  // namespace mlfir
