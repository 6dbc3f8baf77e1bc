#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlfir/adder_graph.hpp"
#include "mlfir/coeff_bounds.hpp"
#include "mlfir/freq_grid.hpp"
#include "mlfir/method_result.hpp"
#include "mlfir/milp.hpp"

namespace mlfir {

/// q = (l_u, l_v, r, s_v) of |2^l_u u + (-1)^s_v 2^l_v v| 2^-r.
struct AOpConfig {
  int l_u = 0;
  int l_v = 0;
  int r = 0;
  int s_v = 0;

  bool operator==(const AOpConfig&) const = default;
};

/// Result of one A-operation, or nullopt when it is not an integer.
std::optional<std::int64_t> apply_aop(std::int64_t u, std::int64_t v, const AOpConfig& q);

/// Every odd positive value <= c_max reachable from u and v by one A-operation,
/// ascending.
std::vector<std::int64_t> a_star(std::int64_t u, std::int64_t v, std::int64_t c_max);

/// Configurations producing w from (u, v), ordered by (r, l_u, l_v, s_v).
std::vector<AOpConfig> aop_configs(std::int64_t u, std::int64_t v, std::int64_t w, std::int64_t c_max);

struct Triplet {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  std::uint32_t w = 0;

  auto operator<=>(const Triplet&) const = default;
};

/// Raised when the stage sets would exceed the configured triplet cap.
class StageSetTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StageSets {
  int wordlength = 0;  // B
  int stages = 0;  // S
  std::int64_t c_max = 0;  // 2^(B+1)
  std::vector<std::vector<std::int64_t>> values;  // values[s] = A^s, sorted
  std::vector<std::vector<Triplet>> triplets;  // triplets[s] = T^s, sorted; triplets[0] empty

  bool contains(int stage, std::int64_t w) const;
  std::size_t triplet_count() const;
  bool operator==(const StageSets&) const = default;
};

struct StageSetOptions {
  std::size_t triplet_cap = std::size_t{1} << 22;
  std::optional<std::string> cache_dir;  // persisted file cache; in-process memo always on
};

StageSets build_stage_sets(int wordlength, int stages, const StageSetOptions& options = {});

void write_stage_sets(const StageSets& sets, const std::string& path);
/// Returns nullopt on a missing, truncated, or mismatching file.
std::optional<StageSets> read_stage_sets(const std::string& path, int wordlength, int stages);
std::string stage_set_cache_name(int wordlength, int stages);

/// w divided by its largest power-of-two divisor. Throws std::invalid_argument for w <= 0.
std::int64_t odd_part(std::int64_t w);

/// ceil(log2(floor((B+1)/2) + 1)).
int max_adder_depth(int wordlength);

struct Ilp2Options {
  milp::SolveOptions solve;
  bool relax = true;  // x and h' continuous
  double margin = 1e-6;  // response-row safety margin, integer-scaled units
  StageSetOptions stage_sets;
};

struct Ilp2Instance {
  int stages = 0;
  int wordlength = 0;
  const StageSets* sets = nullptr;
  milp::MilpModel model;
  ResponseVars response;  // h' (and G) of the filter build
  std::vector<std::map<std::int64_t, milp::VarId>> h_w;  // per m: |h'| value -> h_{m,w}
  std::vector<milp::VarId> sign;  // phi_m
  std::vector<std::map<std::int64_t, milp::VarId>> adder;  // per stage: a_w^s
  std::vector<std::map<std::int64_t, milp::VarId>> wire;  // per stage: r_w^s
  std::vector<std::map<std::pair<std::int64_t, std::int64_t>, milp::VarId>> pair;  // per stage: x^s_(u,v)
  std::set<milp::VarId> relaxable;
};

/// Filter build: response rows on the grid, h'_m in the given bounds.
Ilp2Instance build_ilp2(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                        int stages, const StageSets& sets, double margin = 1e-6);
/// Constant-multiplication build: h'_m fixed to the targets, objective = adders only.
Ilp2Instance build_ilp2_targets(const std::vector<std::int64_t>& targets, int wordlength, int stages,
                                const StageSets& sets);

/// Graph from a solved instance; simulate-verified. Throws GraphError on an
/// assignment that does not describe a realizable graph.
AdderGraph extract_from_ilp2(const Ilp2Instance& instance, const milp::SolveOutcome& outcome);

/// Solves with one adder-depth budget, or with 1..max_adder_depth(B) until the
/// first feasible budget when `depth` is nullopt.
MethodResult solve_bounded_ad(const FilterSpec& spec, const FrequencyGrid& grid, const CoefficientBounds& bounds,
                              std::optional<int> depth, const Ilp2Options& options = {});

}  // namespace mlfir
