#pragma once

#include <string>

#include "hobn/derivation.hpp"

namespace hobn {

struct check_result {
  bool ok = true;
  std::string path;     // dotted premise indices from the root, e.g. "1.0"
  std::string message;  // empty when ok

  explicit operator bool() const { return ok; }
};

// Validates a derivation tree: every node must have the exact judgment
// its rule computes from its premises, axiom names must be pairwise
// distinct, and every name must carry one observation status throughout.
[[nodiscard]] check_result check(const deriv_ptr& d);

}  // namespace hobn
