#pragma once

#include <string>

#include "hobn/bn.hpp"
#include "hobn/derivation.hpp"
#include "hobn/factor.hpp"
#include "hobn/flow.hpp"
#include "hobn/semantics.hpp"
#include "hobn/term.hpp"

// Serializers for every public structure, pretty-printed with two-space
// indentation. Kept behind strings so the JSON library stays private.
namespace hobn {

[[nodiscard]] std::string to_json(const term& t);
[[nodiscard]] std::string to_json(const itype& t);
[[nodiscard]] std::string to_json(const derivation& d);
[[nodiscard]] std::string to_json(const factor& f);
[[nodiscard]] std::string to_json(const bayesian_network& b);
[[nodiscard]] std::string to_json(const flow_graph& g);
[[nodiscard]] std::string to_json(const cost_report& r);
[[nodiscard]] std::string to_json(const query_result& r);

}  // namespace hobn
