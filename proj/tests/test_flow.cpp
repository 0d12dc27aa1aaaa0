#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "hobn/bn.hpp"
#include "hobn/error.hpp"
#include "hobn/flow.hpp"
#include "hobn/infer.hpp"
#include "hobn/rewrite.hpp"
#include "hobn/semantics.hpp"
#include "hobn/surface.hpp"

#include "testkit.hpp"

using namespace hobn;

TEST_CASE("the lawn model's flow graph, node for node") {
  deriv_ptr d = infer_low(parse_program(testkit::src_sprinkler));
  flow_graph g = build_flow(d);
  CHECK(g.positions.size() == 19);
  CHECK(g.edges.size() == 19);
  CHECK(is_acyclic(g));

  auto comps = named_components(g);
  REQUIRE(comps.size() == 4);
  CHECK(comps.at("Dry").size() == 5);
  CHECK(comps.at("Rain").size() == 4);
  CHECK(comps.at("Sprinkler").size() == 3);
  CHECK(comps.at("Wet").size() == 7);

  // ids are unique and sorted, edges well formed
  for (std::size_t i = 1; i < g.positions.size(); ++i)
    CHECK(g.positions[i - 1].id() < g.positions[i].id());
  for (const auto& [from, to] : g.edges) {
    CHECK(from < g.positions.size());
    CHECK(to < g.positions.size());
  }
}

TEST_CASE("collapsing the flow yields the conditioning edges") {
  for (const char* src :
       {testkit::src_sprinkler, testkit::src_sprinkler_posterior,
        testkit::src_rain_wet, testkit::src_coin_learning,
        testkit::src_two_coin, testkit::src_chain_direct,
        testkit::src_chain_nested, testkit::src_shared_sample,
        testkit::src_fork_alias}) {
    deriv_ptr d = infer_low(normalize(parse_program(src)).normal_form);
    bayesian_network direct = extract_bn(d, bn_edge_source::axiom_parents);
    bayesian_network collapsed = extract_bn(d, bn_edge_source::flow_collapse);
    CHECK(direct.edges == collapsed.edges);
    REQUIRE(direct.nodes.size() == collapsed.nodes.size());
    for (std::size_t i = 0; i < direct.nodes.size(); ++i) {
      CHECK(direct.nodes[i].name == collapsed.nodes[i].name);
      CHECK(direct.nodes[i].parents == collapsed.nodes[i].parents);
      CHECK(max_abs_diff(direct.nodes[i].cpt, collapsed.nodes[i].cpt) == 0.0);
    }
  }
}

TEST_CASE("the lawn model's network is the diamond") {
  deriv_ptr d = infer_low(parse_program(testkit::src_sprinkler));
  bayesian_network b = extract_bn(d);
  REQUIRE(b.nodes.size() == 4);
  std::vector<std::pair<std::string, std::string>> expect = {
      {"Dry", "Rain"}, {"Dry", "Sprinkler"}, {"Rain", "Wet"},
      {"Sprinkler", "Wet"}};
  CHECK(b.edges == expect);
  CHECK(b.query == std::vector<std::string>{"Wet"});
  CHECK_FALSE(b.warning.has_value());
}

TEST_CASE("network tables carry the source distributions") {
  query_result q = posterior_query(parse_program(testkit::src_rain_wet));
  REQUIRE(q.bn.nodes.size() == 2);
  const bn_node& rain = q.bn.nodes[0];
  const bn_node& wet = q.bn.nodes[1];
  CHECK(rain.name == "Rain");
  CHECK(rain.parents.empty());
  CHECK(rain.cpt.table[0] == doctest::Approx(0.8));
  CHECK(rain.cpt.table[1] == doctest::Approx(0.2));
  CHECK(wet.name == "Wet");
  CHECK(wet.parents == std::vector<std::string>{"Rain"});
  // wetness observed true: one column per rain value
  REQUIRE(wet.cpt.table.size() == 2);
  CHECK(wet.cpt.table[0] == doctest::Approx(0.01));
  CHECK(wet.cpt.table[1] == doctest::Approx(0.7));
  CHECK(q.bn.query == std::vector<std::string>{"Rain", "Wet"});
}

TEST_CASE("the network's joint matches the factor semantics") {
  for (const char* src :
       {testkit::src_rain_wet, testkit::src_sprinkler,
        testkit::src_chain_direct, testkit::src_two_coin}) {
    deriv_ptr d = infer_low(normalize(parse_program(src)).normal_form);
    factor joint = bn_semantics(extract_bn(d));
    std::set<std::string> internal;
    for (const auto& a : joint.scope) internal.insert(a.name);
    for (const std::string& n : judgment_names(d->concl)) internal.erase(n);
    factor marginal = sum_out(joint, internal);
    CHECK(max_abs_diff(marginal, interpret_global(d)) <= 1e-12);
  }
}

TEST_CASE("cycles are caught") {
  flow_graph g;
  position a, b;
  a.node = 0;
  a.name = "A";
  b.node = 1;
  b.name = "A";
  b.slot = slot_kind::ground_ctx;
  b.entry = "x";
  g.positions = {a, b};
  g.edges = {{0, 1}, {1, 0}};
  CHECK_FALSE(is_acyclic(g));
  g.edges = {{0, 1}};
  CHECK(is_acyclic(g));
}

TEST_CASE("a probabilistic name must stay connected") {
  flow_graph g;
  position main_pos, stray;
  main_pos.node = 0;
  main_pos.name = "A";
  main_pos.main = true;
  stray.node = 1;
  stray.name = "A";
  stray.slot = slot_kind::ground_ctx;
  stray.entry = "x";
  g.positions = {main_pos, stray};
  CHECK_THROWS_AS((void)named_components(g), internal_error);
  g.edges = {{0, 1}};
  auto comps = named_components(g);
  CHECK(comps.at("A").size() == 2);
}

TEST_CASE("exports are valid dot") {
  deriv_ptr d = infer_low(parse_program(testkit::src_rain_wet));
  std::string flow_dot = export_dot(build_flow(d));
  CHECK(flow_dot.rfind("digraph flow {", 0) == 0);
  CHECK(flow_dot.find("Rain") != std::string::npos);
  std::string bn_dot = export_dot(extract_bn(d));
  CHECK(bn_dot.rfind("digraph bn {", 0) == 0);
  CHECK(bn_dot.find("\"Rain\" -> \"Wet\"") != std::string::npos);
  CHECK(bn_dot.find("observed") != std::string::npos);
}

TEST_CASE("open programs are flagged") {
  term_ptr cpt = mk_case(mk_var("p"), 1, {{1, 4}, {3, 4}});
  deriv_ptr d = infer_low(cpt, {{"p", mk_atom("P")}});
  bayesian_network b = extract_bn(d);
  CHECK(b.warning.has_value());
}
