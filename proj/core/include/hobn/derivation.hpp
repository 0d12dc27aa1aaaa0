#pragma once

#include <map>
#include <string>
#include <vector>

#include "hobn/itype.hpp"
#include "hobn/term.hpp"

namespace hobn {

enum class tyrule {
  sample_axiom,  // |- sample d : X
  cond_axiom,    // y1:Y1, ..., yn:Yn |- case <y1,...,yn> of {...} : X
  var_axiom,     // x:P |- x : P
  obs_axiom,     // x:X^b |- obs(x = b) : X^b
  pair_intro,
  letp_split,
  let_bind,
  lambda,
  apply,
  bang_multi,
  force,
};

// Contexts hold exactly the variables the rules thread through a node:
// ground entries map a variable to a ground type, multiset entries to the
// list of types its uses consume.  Empty multiset entries are never
// stored.
struct judgment {
  std::map<std::string, itype_ptr> ground_ctx;
  std::map<std::string, std::vector<itype_ptr>> multiset_ctx;
  term_ptr subject;
  itype_ptr type;
};

struct derivation;
using deriv_ptr = std::shared_ptr<const derivation>;

struct derivation {
  tyrule rule;
  judgment concl;
  std::vector<deriv_ptr> premises;
};

[[nodiscard]] bool is_probabilistic_axiom(const derivation& d);

// Main name of a sample or conditional axiom: the name of its
// conclusion atom.
[[nodiscard]] const std::string& main_name(const derivation& d);

void collect_axioms(const deriv_ptr& d, std::vector<deriv_ptr>& out);

[[nodiscard]] std::set<std::string> judgment_names(const judgment& j);
[[nodiscard]] std::set<std::string> derivation_names(const derivation& d);

// Reduction budget: each let costs 1, force 1, apply 2, pair split 3.
[[nodiscard]] std::uint64_t measure(const derivation& d);

// Node constructors; each computes the conclusion judgment the rule
// dictates from its premises.  They throw internal_error on shape
// violations (these indicate bugs in callers, not user errors).
[[nodiscard]] deriv_ptr make_sample_axiom(term_ptr subject, itype_ptr at);
[[nodiscard]] deriv_ptr make_cond_axiom(term_ptr subject, itype_ptr at,
                                        std::map<std::string, itype_ptr> parents);
[[nodiscard]] deriv_ptr make_var_axiom(std::string var, itype_ptr type);
[[nodiscard]] deriv_ptr make_obs_axiom(std::string var, itype_ptr at);
[[nodiscard]] deriv_ptr make_pair(deriv_ptr l, deriv_ptr r, term_ptr subject);
[[nodiscard]] deriv_ptr make_letp(deriv_ptr scrut, deriv_ptr body,
                                  term_ptr subject);
[[nodiscard]] deriv_ptr make_let(deriv_ptr bound, deriv_ptr body,
                                 term_ptr subject);
[[nodiscard]] deriv_ptr make_lambda(deriv_ptr body, itype_ptr domain,
                                    term_ptr subject);
[[nodiscard]] deriv_ptr make_apply(deriv_ptr fun, deriv_ptr arg,
                                   term_ptr subject);
[[nodiscard]] deriv_ptr make_bang(std::vector<deriv_ptr> premises,
                                  term_ptr subject);
[[nodiscard]] deriv_ptr make_force(deriv_ptr premise, term_ptr subject);

// Rebuilds a derivation with the given atom renaming applied everywhere;
// names absent from the map are kept.
[[nodiscard]] deriv_ptr rename_names(const deriv_ptr& d,
                                     const std::map<std::string, std::string>& m);

// Rebuilds a derivation with observation marks set per name: mapped
// names become observed with the given polarity, unmapped names become
// plain.
[[nodiscard]] deriv_ptr set_observed(const deriv_ptr& d,
                                     const std::map<std::string, bool>& m);

// Renames axiom names to X0, X1, ... in leftmost-axiom order, for
// comparing derivations up to the choice of names.
[[nodiscard]] deriv_ptr canonical_names(const deriv_ptr& d);

// Renames a free term variable throughout subjects and context keys.
[[nodiscard]] deriv_ptr rename_free_var(const deriv_ptr& d,
                                        const std::string& from,
                                        const std::string& to);

[[nodiscard]] const char* rule_label(tyrule r);

// One line per rule, premises indented under their conclusion.
[[nodiscard]] std::string derivation_to_text(const derivation& d);

}  // namespace hobn
