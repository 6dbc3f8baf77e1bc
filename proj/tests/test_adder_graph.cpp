#include <doctest.h>

#include "mlfir/adder_graph.hpp"

using namespace mlfir;

namespace {

// 7 = 8 - 1, 23 = 7 + 16: the classic two-adder MCM for {7, 23}.
AdderGraph seven_twenty_three() {
  AdderGraph g;
  const int n7 = g.add_node({0, 3, false}, {0, 0, true});
  const int n23 = g.add_node({n7, 0, false}, {0, 4, false});
  g.set_outputs({{n7, 0, 1}, {n23, 1, -1}, OutputTap::zero()});
  return g;
}

}  // namespace

TEST_CASE("adder evaluation") {
  CHECK(evaluate_adder(1, {0, 2, false}, 1, {0, 0, false}) == 5);
  CHECK(evaluate_adder(1, {0, 3, false}, 1, {0, 0, true}) == 7);
  CHECK(evaluate_adder(3, {0, 0, true}, 5, {0, 0, false}) == 2);
  // (5 + 3) >> 3 = 1
  CHECK(evaluate_adder(5, {0, -3, false}, 3, {0, -3, false}) == 1);
  CHECK_THROWS_AS(evaluate_adder(5, {0, -1, false}, 3, {0, -2, false}), GraphError);
  CHECK_THROWS_AS(evaluate_adder(5, {0, -2, false}, 3, {0, -2, true}), GraphError);  // 2 / 4
  CHECK_THROWS_AS(evaluate_adder(1, {0, 1, true}, 1, {0, 0, true}), GraphError);
}

TEST_CASE("simulation of a small graph") {
  const AdderGraph g = seven_twenty_three();
  const auto v = simulate(g);
  CHECK(v == std::vector<std::int64_t>{1, 7, 23});
  CHECK(g.adder_count() == 2);
  CHECK(g.depth() == 2);
  CHECK(g.coefficients() == std::vector<std::int64_t>{7, -46, 0});
  CHECK(g.find_value(23) == 2);
  CHECK(g.find_value(9) == -1);
}

TEST_CASE("simulation rejects corrupt graphs") {
  {
    AdderGraph g;
    g.add_node_raw({0, 9, 1, {0, 3, false}, {0, 0, false}});
    CHECK_NOTHROW(simulate(g));
    AdderGraph bad;
    bad.add_node_raw({0, 11, 1, {0, 3, false}, {0, 0, false}});
    CHECK_THROWS_AS(simulate(bad), GraphError);
  }
  {
    AdderGraph g;  // cycle 1 <-> 2
    g.add_node_raw({0, 3, 1, {2, 0, false}, {0, 0, false}});
    g.add_node_raw({0, 5, 2, {1, 0, false}, {0, 0, false}});
    CHECK_THROWS_AS(simulate(g), GraphError);
  }
  {
    AdderGraph g;  // dangling reference
    g.add_node_raw({0, 3, 1, {7, 0, false}, {0, 0, false}});
    CHECK_THROWS_AS(simulate(g), GraphError);
  }
  {
    AdderGraph g;  // even result
    g.add_node_raw({0, 2, 1, {0, 0, false}, {0, 0, false}});
    CHECK_THROWS_AS(simulate(g), GraphError);
  }
  {
    AdderGraph g;  // stage not deeper than an input
    g.add_node_raw({0, 3, 0, {0, 1, false}, {0, 0, false}});
    CHECK_THROWS_AS(simulate(g), GraphError);
  }
}

TEST_CASE("JSON round trip") {
  const AdderGraph g = seven_twenty_three();
  const AdderGraph back = parse_graph(emit(g, GraphFormat::Json));
  CHECK(back == g);
  CHECK_THROWS_AS(parse_graph("{\"format\": 1}"), GraphError);
  CHECK_THROWS_AS(parse_graph("not json"), GraphError);

  auto doc = graph_to_json(g);
  doc["nodes"][1]["value"] = 9;
  CHECK_THROWS_AS(graph_from_json(doc), GraphError);
}

TEST_CASE("DOT output names every node and tap") {
  const std::string dot = emit(seven_twenty_three(), GraphFormat::Dot);
  CHECK(dot.find("digraph") == 0);
  CHECK(dot.find("label=\"23\"") != std::string::npos);
  CHECK(dot.find("h1 = -46") != std::string::npos);
}

TEST_CASE("solution counts are checked against the graph") {
  FilterSpec s;
  s.type = FilterType::I;
  s.order = 4;
  s.bands = {{0.0, 1.0, -10.0, 10.0}};
  const AdderGraph g = seven_twenty_three();
  const DesignSolution sol = make_solution(s, g.coefficients(), 1.0, g, Optimality::ProvenOptimal);
  CHECK(sol.adders_mb == 2);
  CHECK(sol.adders_structural == 2);  // zero outer pair saves two
  CHECK(sol.adders_total == 4);
  CHECK(sol.to_json()["coefficients"] == nlohmann::json{0, -46, 7});
  DesignSolution broken = sol;
  broken.coefficients[0] = 8;
  CHECK_THROWS_AS(broken.check(), GraphError);
}
