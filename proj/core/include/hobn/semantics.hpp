#pragma once

#include <cstdint>
#include <vector>

#include "hobn/bn.hpp"
#include "hobn/derivation.hpp"
#include "hobn/factor.hpp"
#include "hobn/infer.hpp"

namespace hobn {

// Factor of a single axiom: sample and conditional axioms yield their
// distribution restricted to the observed slices, every other axiom
// is the unit.
[[nodiscard]] factor axiom_factor(const derivation& d);

// Product of all probabilistic axiom factors, marginalized down to the
// names of the conclusion judgment.
[[nodiscard]] factor interpret_global(const deriv_ptr& d,
                                      op_counter* ops = nullptr);

struct decorated_node {
  deriv_ptr node;
  factor psi;
  std::vector<decorated_node> premises;
};

struct interp_stats {
  op_counter ops;
  std::size_t max_width = 0;  // unobserved width of the widest factor built
};

// Bottom-up interpretation: each internal node multiplies its premise
// factors and sums out the names that do not survive into its own
// judgment. The root factor equals interpret_global.
[[nodiscard]] decorated_node interpret_inductive(const deriv_ptr& d,
                                                 interp_stats* stats = nullptr);

// No name internal to one premise may leak into a sibling.
[[nodiscard]] bool check_compatibility(const std::vector<deriv_ptr>& premises);

struct cost_report {
  std::uint64_t multiplications = 0;
  std::uint64_t additions = 0;
  std::size_t prob_axioms = 0;        // m
  std::size_t axiom_names = 0;        // n, distinct names across axioms
  std::size_t max_width = 0;          // W
  std::uint64_t bound_global = 0;     // m * 2^n
  std::uint64_t bound_inductive = 0;  // m * 2^W
};

// Work of interpreting the derivation inductively, with the bounds the
// two interpretation schemes respect.
[[nodiscard]] cost_report cost(const deriv_ptr& d);

struct query_result {
  factor marginal;
  factor posterior;
  double evidence = 0;
  bayesian_network bn;
  cost_report cost;
  deriv_ptr deriv;     // derivation of the input program
  deriv_ptr compiled;  // derivation of its normal form
};

// End to end: normalize, type, interpret the compiled form, normalize
// the result and extract the network. Requires a ground conclusion.
[[nodiscard]] query_result posterior_query(const term_ptr& t,
                                           std::uint64_t fuel = default_fuel);

}  // namespace hobn
