#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hobn/derivation.hpp"
#include "hobn/factor.hpp"

namespace hobn {

struct bn_node {
  std::string name;
  std::vector<std::string> parents;  // sorted
  factor cpt;
};

struct bayesian_network {
  std::vector<bn_node> nodes;  // sorted by name
  std::vector<std::pair<std::string, std::string>> edges;  // sorted
  std::vector<std::string> query;  // conclusion type names, left to right
  std::optional<std::string> warning;  // set for open programs
};

// How the edge set is computed: straight from each conditional axiom's
// parent entries, or by collapsing same-name flow vertices. The two
// must agree; the slower collapse is kept for cross-checking.
enum class bn_edge_source { axiom_parents, flow_collapse };

[[nodiscard]] bayesian_network extract_bn(
    const deriv_ptr& d,
    bn_edge_source mode = bn_edge_source::axiom_parents);

// Joint distribution the network denotes: the product of every CPT.
[[nodiscard]] factor bn_semantics(const bayesian_network& b);

[[nodiscard]] std::string export_dot(const bayesian_network& b);

}  // namespace hobn
