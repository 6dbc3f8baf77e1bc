#include "mlfir/adder_graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace mlfir {

namespace {

constexpr int kMaxShift = 40;

nlohmann::ordered_json operand_json(const Operand& op) {
  nlohmann::ordered_json j;
  j["src"] = op.src;
  j["shift"] = op.shift;
  j["neg"] = op.negated;
  return j;
}

Operand operand_from_json(const nlohmann::json& j) {
  return {j.at("src").get<int>(), j.at("shift").get<int>(), j.at("neg").get<bool>()};
}

}  // namespace

std::int64_t evaluate_adder(std::int64_t left_value, const Operand& left, std::int64_t right_value,
                            const Operand& right) {
  if (left.negated && right.negated) throw GraphError("both adder inputs negated");
  if (std::abs(left.shift) > kMaxShift || std::abs(right.shift) > kMaxShift) throw GraphError("shift out of range");
  const std::int64_t a = left.negated ? -left_value : left_value;
  const std::int64_t b = right.negated ? -right_value : right_value;
  if (left.shift >= 0 && right.shift >= 0) return a * (std::int64_t{1} << left.shift) + b * (std::int64_t{1} << right.shift);
  if (left.shift != right.shift) throw GraphError("right shifts must be equal on both adder inputs");
  const std::int64_t sum = a + b;
  const std::int64_t div = std::int64_t{1} << -left.shift;
  if (sum % div != 0) throw GraphError("right shift drops nonzero bits");
  return sum / div;
}

AdderGraph::AdderGraph() { nodes_.push_back({0, 1, 0, {}, {}}); }

int AdderGraph::add_node(Operand left, Operand right, std::optional<int> stage) {
  const AdderNode& l = node(left.src);
  const AdderNode& r = node(right.src);
  AdderNode n;
  n.id = static_cast<int>(nodes_.size());
  n.value = evaluate_adder(l.value, left, r.value, right);
  n.stage = stage.value_or(std::max(l.stage, r.stage) + 1);
  n.left = left;
  n.right = right;
  nodes_.push_back(n);
  return n.id;
}

int AdderGraph::add_node_raw(AdderNode node) {
  node.id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  return node.id;
}

void AdderGraph::set_output(std::size_t m, OutputTap tap) {
  if (outputs_.size() <= m) outputs_.resize(m + 1);
  outputs_[m] = tap;
}

int AdderGraph::depth() const {
  int d = 0;
  for (const AdderNode& n : nodes_) d = std::max(d, n.stage);
  return d;
}

int AdderGraph::find_value(std::int64_t value) const {
  for (const AdderNode& n : nodes_) {
    if (n.value == value) return n.id;
  }
  return -1;
}

std::vector<std::int64_t> AdderGraph::coefficients() const {
  std::vector<std::int64_t> h;
  h.reserve(outputs_.size());
  for (const OutputTap& t : outputs_) {
    if (t.is_zero()) {
      h.push_back(0);
      continue;
    }
    h.push_back(t.sign * (node(t.node).value << t.shift));
  }
  return h;
}

std::vector<std::int64_t> simulate(const AdderGraph& graph) {
  const auto& nodes = graph.nodes();
  const std::size_t n = nodes.size();
  if (n == 0 || nodes[0].value != 1 || nodes[0].stage != 0) throw GraphError("node 0 must be the input with value 1");
  std::vector<std::int64_t> value(n, 0);
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  value[0] = 1;
  state[0] = 2;

  auto check_ref = [&](int id, std::size_t from) {
    if (id < 0 || static_cast<std::size_t>(id) >= n)
      throw GraphError("node " + std::to_string(from) + " references missing node " + std::to_string(id));
  };

  // Iterative DFS so deep chains cannot overflow the stack.
  for (std::size_t root = 1; root < n; ++root) {
    if (state[root] == 2) continue;
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      const std::size_t id = stack.back();
      const AdderNode& nd = nodes[id];
      if (nd.id != static_cast<int>(id)) throw GraphError("node ids must match their position");
      check_ref(nd.left.src, id);
      check_ref(nd.right.src, id);
      state[id] = 1;
      bool pending = false;
      for (const int src : {nd.left.src, nd.right.src}) {
        const auto s = static_cast<std::size_t>(src);
        if (state[s] == 1) throw GraphError("cycle through node " + std::to_string(src));
        if (state[s] == 0) {
          stack.push_back(s);
          pending = true;
        }
      }
      if (pending) continue;
      stack.pop_back();
      const AdderNode& l = nodes[static_cast<std::size_t>(nd.left.src)];
      const AdderNode& r = nodes[static_cast<std::size_t>(nd.right.src)];
      if (l.stage >= nd.stage || r.stage >= nd.stage)
        throw GraphError("node " + std::to_string(id) + " is not deeper than its inputs");
      const std::int64_t v = evaluate_adder(value[static_cast<std::size_t>(l.id)], nd.left,
                                            value[static_cast<std::size_t>(r.id)], nd.right);
      if (v != nd.value)
        throw GraphError("node " + std::to_string(id) + " computes " + std::to_string(v) + ", claims " +
                         std::to_string(nd.value));
      if (v <= 0 || v % 2 == 0) throw GraphError("node " + std::to_string(id) + " is not an odd positive fundamental");
      value[id] = v;
      state[id] = 2;
    }
  }

  for (std::size_t m = 0; m < graph.outputs().size(); ++m) {
    const OutputTap& t = graph.outputs()[m];
    if (t.is_zero()) {
      if (t.sign != 0 || t.shift != 0) throw GraphError("zero tap " + std::to_string(m) + " carries a sign or shift");
      continue;
    }
    if (static_cast<std::size_t>(t.node) >= n) throw GraphError("tap " + std::to_string(m) + " references a missing node");
    if (t.sign != 1 && t.sign != -1) throw GraphError("tap " + std::to_string(m) + " has no sign");
    if (t.shift < 0 || t.shift > kMaxShift) throw GraphError("tap " + std::to_string(m) + " has an invalid shift");
  }
  return value;
}

std::string emit(const AdderGraph& graph, GraphFormat format) {
  if (format == GraphFormat::Json) return graph_to_json(graph).dump(2) + "\n";
  std::ostringstream out;
  out << "digraph mb {\n  rankdir=LR;\n";
  for (const AdderNode& n : graph.nodes())
    out << "  n" << n.id << " [label=\"" << n.value << "\"" << (n.id == 0 ? ", shape=doublecircle" : "") << "];\n";
  auto edge = [&](int to, const Operand& op) {
    std::string label;
    if (op.shift > 0) label = "<<" + std::to_string(op.shift);
    if (op.shift < 0) label = ">>" + std::to_string(-op.shift);
    if (op.negated) label += label.empty() ? "-" : " -";
    out << "  n" << op.src << " -> n" << to;
    if (!label.empty()) out << " [label=\"" << label << "\"]";
    out << ";\n";
  };
  for (const AdderNode& n : graph.nodes()) {
    if (n.id == 0) continue;
    edge(n.id, n.left);
    edge(n.id, n.right);
  }
  const auto h = graph.coefficients();
  for (std::size_t m = 0; m < graph.outputs().size(); ++m) {
    const OutputTap& t = graph.outputs()[m];
    if (t.is_zero()) continue;
    out << "  h" << m << " [shape=box, label=\"h" << m << " = " << h[m] << "\"];\n";
    out << "  n" << t.node << " -> h" << m;
    if (t.shift > 0 || t.sign < 0)
      out << " [label=\"" << (t.shift > 0 ? "<<" + std::to_string(t.shift) : "") << (t.sign < 0 ? " -" : "") << "\"]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

nlohmann::ordered_json graph_to_json(const AdderGraph& graph) {
  nlohmann::ordered_json doc;
  doc["format"] = 1;
  auto& nodes = doc["nodes"] = nlohmann::ordered_json::array();
  for (const AdderNode& n : graph.nodes()) {
    nlohmann::ordered_json j;
    j["id"] = n.id;
    j["value"] = n.value;
    j["stage"] = n.stage;
    if (n.id == 0) {
      j["left"] = nullptr;
      j["right"] = nullptr;
    } else {
      j["left"] = operand_json(n.left);
      j["right"] = operand_json(n.right);
    }
    nodes.push_back(std::move(j));
  }
  auto& outputs = doc["outputs"] = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < graph.outputs().size(); ++m) {
    const OutputTap& t = graph.outputs()[m];
    nlohmann::ordered_json j;
    j["m"] = m;
    if (t.is_zero())
      j["node"] = nullptr;
    else
      j["node"] = t.node;
    j["shift"] = t.shift;
    j["sign"] = t.sign;
    outputs.push_back(std::move(j));
  }
  return doc;
}

AdderGraph graph_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<int>() != 1) throw GraphError("unsupported graph format version");
    AdderGraph g;
    const auto& nodes = doc.at("nodes");
    if (nodes.empty() || nodes[0].at("value").get<std::int64_t>() != 1)
      throw GraphError("graph must start with the input node");
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const auto& j = nodes[i];
      if (j.at("id").get<std::size_t>() != i) throw GraphError("graph node ids must be consecutive");
      g.add_node_raw({0, j.at("value").get<std::int64_t>(), j.at("stage").get<int>(), operand_from_json(j.at("left")),
                      operand_from_json(j.at("right"))});
    }
    std::vector<OutputTap> outs;
    for (const auto& j : doc.at("outputs")) {
      if (j.at("m").get<std::size_t>() != outs.size()) throw GraphError("graph outputs must be listed in order");
      OutputTap t;
      t.node = j.at("node").is_null() ? -1 : j.at("node").get<int>();
      t.shift = j.at("shift").get<int>();
      t.sign = j.at("sign").get<int>();
      outs.push_back(t);
    }
    g.set_outputs(std::move(outs));
    simulate(g);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw GraphError(std::string("malformed graph JSON: ") + e.what());
  }
}

AdderGraph parse_graph(const std::string& json_text) {
  try {
    return graph_from_json(nlohmann::json::parse(json_text));
  } catch (const nlohmann::json::parse_error& e) {
    throw GraphError(std::string("malformed graph JSON: ") + e.what());
  }
}

const char* to_string(Optimality o) { return o == Optimality::ProvenOptimal ? "optimal" : "best-known"; }

void DesignSolution::check() const {
  simulate(graph);
  if (graph.coefficients() != coefficients) throw GraphError("graph taps do not reproduce the coefficients");
  if (adders_mb != graph.adder_count()) throw GraphError("A_M disagrees with the graph");
  if (adders_structural != structural_adder_count(spec.type, spec.order, coefficients))
    throw GraphError("A_S disagrees with the coefficient zero pattern");
  if (adders_total != adders_mb + adders_structural) throw GraphError("A != A_M + A_S");
  if (adder_depth != graph.depth()) throw GraphError("adder depth disagrees with the graph");
}

nlohmann::ordered_json DesignSolution::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = 1;
  doc["spec"] = spec_to_json(spec);
  doc["coefficients"] = to_printed_order(coefficients);
  doc["gain"] = gain;
  doc["A_M"] = adders_mb;
  doc["A_S"] = adders_structural;
  doc["A"] = adders_total;
  doc["AD"] = adder_depth;
  doc["violation"] = violation;
  doc["optimality"] = to_string(optimality);
  doc["graph"] = graph_to_json(graph);
  return doc;
}

DesignSolution make_solution(const FilterSpec& spec, std::vector<std::int64_t> coefficients, double gain,
                             AdderGraph graph, Optimality optimality) {
  DesignSolution s;
  s.spec = spec;
  s.coefficients = std::move(coefficients);
  s.gain = gain;
  s.graph = std::move(graph);
  s.adders_mb = s.graph.adder_count();
  s.adders_structural = structural_adder_count(spec.type, spec.order, s.coefficients);
  s.adders_total = s.adders_mb + s.adders_structural;
  s.adder_depth = s.graph.depth();
  s.optimality = optimality;
  s.check();
  return s;
}

}  // namespace mlfir
