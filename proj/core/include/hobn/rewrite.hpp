#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hobn/term.hpp"

namespace hobn {

enum class rewrite_rule {
  substitute_let,  // let x = <v>S in t  ->  <t{x:=v}>S
  beta,            // (<\x.t>S) v       ->  <t{x:=v}>S
  force_thunk,     // der !t            ->  t
  split_pair,      // letp <x,y> = <v,w> in t -> t{x:=v}{y:=w}
};

struct redex {
  std::vector<int> path;  // child indices from the root
  rewrite_rule rule;
};

inline constexpr std::uint64_t default_fuel = 100000;

// Redex occurrences reachable through evaluation contexts, outermost and
// leftmost first.  Reduction never enters abstractions, thunks, pair
// components or letp bodies.
[[nodiscard]] std::vector<redex> find_redexes(const term_ptr& t);

// Contracts the given occurrence; throws internal_error if the rule no
// longer matches there.
[[nodiscard]] term_ptr apply_redex(const term_ptr& t, const redex& r);

struct step_result {
  term_ptr after;
  redex contracted;
};

// One step of the leftmost-outermost strategy; nullopt at a normal form.
[[nodiscard]] std::optional<step_result> step(const term_ptr& t);

struct trace_entry {
  redex contracted;
  term_ptr after;
};

struct reduce_result {
  term_ptr normal_form;
  std::vector<trace_entry> steps;
};

// Reduces to a normal form under the leftmost-outermost strategy.
// Throws fuel_exhausted once `fuel` steps have been taken with the term
// still reducible.
[[nodiscard]] reduce_result normalize(const term_ptr& t,
                                      std::uint64_t fuel = default_fuel);

// Renames the binders of a leading let/letp spine away from `avoid`, so
// a term from outside the spine can be plugged under it without capture.
// Deterministic; contraction and its replay both rely on that.
[[nodiscard]] term_ptr freshen_spine(const term_ptr& m,
                                     const std::set<std::string>& avoid);

// Membership in the Bayesian network normal form grammar: a chain of
// let-bound statements (samples, conditionals over variables,
// observations, and lets over those) ending in a statement or a
// first-order value.
[[nodiscard]] bool is_bn_normal_form(const term& t);

struct reduction_summary {
  std::set<std::uint64_t> path_lengths;  // lengths of maximal sequences
  std::vector<term_ptr> normal_forms;    // distinct up to alpha, sorted
};

// Explores every reduction choice, memoizing states up to alpha
// equivalence. `fuel` bounds the total number of contractions across
// the whole exploration.
[[nodiscard]] reduction_summary reduction_graph(const term_ptr& t,
                                                std::uint64_t fuel = default_fuel);

const char* rule_name(rewrite_rule r);

}  // namespace hobn
