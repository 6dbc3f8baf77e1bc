#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlfir/filter_spec.hpp"

namespace mlfir {

/// Raised when a graph does not compute what it claims (bad extraction or
/// corrupt input file).
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One adder input: value(src) * 2^shift, possibly negated. A negative shift
/// is a right shift and must then appear with the same value on both inputs.
struct Operand {
  int src = 0;
  int shift = 0;
  bool negated = false;

  bool operator==(const Operand&) const = default;
};

struct AdderNode {
  int id = 0;
  std::int64_t value = 1;  // odd positive fundamental
  int stage = 0;
  Operand left;
  Operand right;

  bool operator==(const AdderNode&) const = default;
};

/// Coefficient tap: h'_m = sign * 2^shift * value(node), or zero.
struct OutputTap {
  int node = -1;  // -1: zero coefficient
  int shift = 0;
  int sign = 0;  // +1, -1, or 0 for zero

  bool is_zero() const { return node < 0; }
  bool operator==(const OutputTap&) const = default;
  static OutputTap zero() { return {}; }
};

/// Multiplier block as a DAG of shift-add nodes; node 0 is the input (value 1).
class AdderGraph {
 public:
  AdderGraph();

  /// Appends a node computing left + right. The value is evaluated exactly
  /// and the stage set to one past the deeper input unless given.
  int add_node(Operand left, Operand right, std::optional<int> stage = std::nullopt);
  /// Appends a node with a claimed value, checked later by simulate().
  int add_node_raw(AdderNode node);

  void set_outputs(std::vector<OutputTap> outputs) { outputs_ = std::move(outputs); }
  void set_output(std::size_t m, OutputTap tap);

  const std::vector<AdderNode>& nodes() const { return nodes_; }
  const std::vector<OutputTap>& outputs() const { return outputs_; }
  const AdderNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }

  int adder_count() const { return static_cast<int>(nodes_.size()) - 1; }
  int depth() const;
  /// Node id holding a fundamental, or -1.
  int find_value(std::int64_t value) const;

  /// Coefficients implied by the output taps.
  std::vector<std::int64_t> coefficients() const;

  bool operator==(const AdderGraph&) const = default;

 private:
  std::vector<AdderNode> nodes_;
  std::vector<OutputTap> outputs_;
};

/// Exact evaluation of one adder; throws GraphError when the shifts do not
/// follow the odd-fundamental convention or the result is not an integer.
std::int64_t evaluate_adder(std::int64_t left_value, const Operand& left, std::int64_t right_value,
                            const Operand& right);

/// Evaluates every node in exact integer arithmetic and checks each stored
/// value, stage ordering, and output tap. Returns the values by node id.
/// Throws GraphError on a cycle, a dangling reference, or a mismatch.
std::vector<std::int64_t> simulate(const AdderGraph& graph);

enum class GraphFormat { Json, Dot };

std::string emit(const AdderGraph& graph, GraphFormat format);
nlohmann::ordered_json graph_to_json(const AdderGraph& graph);
/// Inverse of graph_to_json; the result is simulate-verified.
AdderGraph graph_from_json(const nlohmann::json& doc);
AdderGraph parse_graph(const std::string& json_text);

enum class Optimality { ProvenOptimal, BestKnown };

const char* to_string(Optimality o);

struct DesignSolution {
  FilterSpec spec;
  std::vector<std::int64_t> coefficients;  // basis order, index 0 = center
  double gain = 1.0;
  AdderGraph graph;
  int adders_mb = 0;  // A_M
  int adders_structural = 0;  // A_S
  int adders_total = 0;  // A
  int adder_depth = 0;
  double violation = 0.0;
  Optimality optimality = Optimality::ProvenOptimal;

  /// Throws GraphError when counts, taps, or coefficients disagree.
  void check() const;
  nlohmann::ordered_json to_json() const;
};

/// Fills the counts of a solution from its graph and coefficients.
DesignSolution make_solution(const FilterSpec& spec, std::vector<std::int64_t> coefficients, double gain,
                             AdderGraph graph, Optimality optimality);

}  // namespace mlfir
