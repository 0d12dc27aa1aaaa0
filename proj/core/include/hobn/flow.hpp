#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hobn/derivation.hpp"

namespace hobn {

enum class slot_kind { ground_ctx, multiset_ctx, subject_type };

// One atom occurrence inside one judgment of a derivation. The path
// walks the type: 0/1 through tensors and arrows, the element index
// through multisets (for context entries the element index is split
// out so the path stays relative to a single element type).
struct position {
  std::size_t node = 0;        // preorder index of the derivation node
  slot_kind slot = slot_kind::subject_type;
  std::string entry;           // context variable, empty for the type
  std::size_t elem = 0;        // multiset context element index
  std::vector<int> path;
  bool input = false;          // polarity: up when true, down when false
  std::string name;            // underlying atom name
  bool main = false;           // type position of a probabilistic axiom

  [[nodiscard]] std::string id() const;
};

struct flow_graph {
  std::vector<position> positions;  // sorted by id
  // Directed edges as indices into positions. Context and type edges
  // link same-name occurrences; conditional axioms also link each
  // parent occurrence to the axiom's main position.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

[[nodiscard]] flow_graph build_flow(const deriv_ptr& d);

[[nodiscard]] bool is_acyclic(const flow_graph& g);

// Groups positions by underlying name, following only edges whose
// endpoints share that name. For every name owned by a probabilistic
// axiom the group must be a single component reachable from the main
// position; throws internal_error when it splits.
[[nodiscard]] std::map<std::string, std::vector<std::size_t>> named_components(
    const flow_graph& g);

[[nodiscard]] std::string export_dot(const flow_graph& g);

}  // namespace hobn
