#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hobn/derivation.hpp"
#include "hobn/rewrite.hpp"

namespace hobn {

// Syntax-directed inference for first-order terms (the normal-form
// fragment: no thunks, forces, abstractions or applications) under a
// ground context.  Produces the unique derivation whose only observed
// atoms are those forced by observations.  Axiom names are derived from
// the binding variable when one is available, X0, X1, ... otherwise.
// Throws type_error when the term has no derivation.
[[nodiscard]] deriv_ptr infer_low(
    const term_ptr& t, const std::map<std::string, itype_ptr>& ctx = {});

struct infer_result {
  deriv_ptr deriv;
  reduce_result reduction;
};

// Inference for arbitrary closed terms: reduce to a normal form, type
// it, then replay the reduction backwards, expanding the derivation one
// step at a time until it types the original term.
[[nodiscard]] infer_result infer_ground(const term_ptr& t,
                                        std::uint64_t fuel = default_fuel);

// One backward step of the replay: given the derivation of the term the
// contraction produced, rebuilds the derivation of `before`, the term it
// consumed. Throws type_error when `before` is not typable.
[[nodiscard]] deriv_ptr expand_step(const deriv_ptr& d,
                                    const term_ptr& before, const redex& r);

// Drops observation marks not forced by an observation axiom.
[[nodiscard]] deriv_ptr generalize(const deriv_ptr& d);

}  // namespace hobn
