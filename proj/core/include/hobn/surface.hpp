#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hobn/rational.hpp"
#include "hobn/term.hpp"

namespace hobn {

// Surface syntax as written in .hobn files, before macro expansion and
// desugaring: tuples are n-ary, applications/der/obs/letp/case accept
// arbitrary subterms, numerals abbreviate encoded naturals.
enum class surface_kind {
  variable,
  boolean,
  numeral,
  sample,
  tuple,
  bang,
  der,
  abs,
  app,
  let_in,
  letp_in,
  case_of,
  observe,
};

struct surface_term;
using surface_ptr = std::shared_ptr<const surface_term>;

struct surface_term {
  surface_kind kind;
  std::string name;                  // variable
  bool flag = false;                 // boolean; observe's observed value
  std::uint64_t numeral = 0;         // numeral
  rational prob;                     // sample
  std::vector<std::string> binders;  // abs/let_in: one; letp_in: two or more
  int case_arity = 0;
  std::vector<rational> clauses;
  std::vector<surface_ptr> children;
  // children layout: tuple: components; bang/der: [body]; abs: [body];
  // app: [function, argument]; let_in: [bound, body]; letp_in/case_of:
  // [scrutinee, ...body for letp]; observe: [subject]
  int line = 0, col = 0;
};

surface_ptr parse_surface(const std::string& source);

// Replaces free occurrences of prelude macro names (fix, ifZero, pred,
// succ, zero) and numeral literals by their encodings.
surface_ptr expand_macros(const surface_ptr& s);

// Lowers surface syntax into the core calculus, inserting administrative
// lets for non-value subterms in value positions. Fresh binders are named
// _0, _1, ... skipping identifiers already used in the program.
term_ptr desugar(const surface_ptr& s);

// parse + expand_macros + desugar
term_ptr parse_program(const std::string& source);

}  // namespace hobn
