#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "hobn/rational.hpp"

namespace hobn {

// Core calculus after desugaring. Values are variable, pair_value, bang
// and abstraction. Invariants established by the desugarer:
//   - application arguments, pair components, der arguments and letp
//     scrutinees are values
//   - case scrutinees are values (a variable or a right-nested pair of
//     values), clauses cover all 2^n boolean patterns and sample
//   - observe takes a variable
// Boolean constants parse but are rejected by type inference; they are
// carried through so the checker can point at them.
enum class term_kind {
  variable,
  boolean,
  pair_value,
  bang,
  abstraction,
  sample,
  case_of,
  observe,
  let_in,
  letp_in,
  application,
  der,
};

struct term;
using term_ptr = std::shared_ptr<const term>;

struct term {
  term_kind kind;
  std::string name;    // variable / observe subject / binders below
  std::string binder;  // abstraction, let_in, letp_in (first component)
  std::string binder2;            // letp_in second component
  bool flag = false;              // boolean value; observe's observed value
  rational prob;                  // sample
  int case_arity = 0;             // case_of
  std::vector<rational> clauses;  // case_of, 2^case_arity entries
  std::vector<term_ptr> children;

  // children layout:
  //   pair_value:  [left, right]        bang: [body]
  //   abstraction: [body]               case_of: [scrutinee]
  //   let_in:      [bound, body]        letp_in: [scrutinee, body]
  //   application: [function, argument] der: [argument]
};

term_ptr mk_var(std::string name);
term_ptr mk_bool(bool b);
term_ptr mk_pair(term_ptr l, term_ptr r);
term_ptr mk_bang(term_ptr body);
term_ptr mk_abs(std::string binder, term_ptr body);
term_ptr mk_sample(rational p);
term_ptr mk_case(term_ptr scrutinee, int arity, std::vector<rational> clauses);
term_ptr mk_observe(std::string var, bool value);
term_ptr mk_let(std::string binder, term_ptr bound, term_ptr body);
term_ptr mk_letp(std::string b1, std::string b2, term_ptr scrutinee,
                 term_ptr body);
term_ptr mk_app(term_ptr fun, term_ptr arg);
term_ptr mk_der(term_ptr arg);

[[nodiscard]] bool is_value(const term& t);
[[nodiscard]] bool is_low_level(const term& t);
[[nodiscard]] std::set<std::string> free_vars(const term& t);
[[nodiscard]] std::set<std::string> all_names(const term& t);

// Capture-avoiding substitution of a value for a free variable. Colliding
// binders are renamed deterministically (primes appended).
[[nodiscard]] term_ptr substitute(const term_ptr& t, const std::string& var,
                                  const term_ptr& value);

// A variant of `base` decorated with primes until it avoids `avoid`.
[[nodiscard]] std::string fresh_name(const std::string& base,
                                     const std::set<std::string>& avoid);

[[nodiscard]] bool equal(const term& a, const term& b);
[[nodiscard]] bool alpha_equal(const term& a, const term& b);

// Index of a clause pattern: first component is the most significant bit,
// t = 1, f = 0.
// Leaves of a nested pair value, left to right; a non-pair is its own leaf.
void flatten_pair_tree(const term_ptr& t, std::vector<term_ptr>& out);

[[nodiscard]] int pattern_index(const std::vector<bool>& pattern);
[[nodiscard]] std::vector<bool> index_pattern(int index, int arity);

// Pretty printer for the core syntax; its output parses back to the same
// term and re-prints to the same string.
[[nodiscard]] std::string pretty(const term& t);

}  // namespace hobn
