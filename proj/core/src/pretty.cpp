#include <string>

#include "hobn/error.hpp"
#include "hobn/term.hpp"

namespace hobn {

namespace {

// Precedence levels: 0 admits every construct, 1 application heads,
// 2 atoms only.  A node below the required level is parenthesized.
int level_of(const term& t) {
  switch (t.kind) {
    case term_kind::let_in:
    case term_kind::letp_in:
    case term_kind::abstraction:
      return 0;
    case term_kind::application:
    case term_kind::der:
    case term_kind::sample:
    case term_kind::case_of:
    case term_kind::observe:
      return 1;
    default:
      return 2;
  }
}

std::string pattern_text(const std::vector<bool>& pattern) {
  if (pattern.size() == 1) return pattern[0] ? "t" : "f";
  std::string out = "<";
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (i) out += ", ";
    out += pattern[i] ? "t" : "f";
  }
  return out + ">";
}

void go(const term& t, int level, std::string& out);

void emit(const term& t, int level, std::string& out) {
  if (level_of(t) < level) {
    out += "(";
    go(t, 0, out);
    out += ")";
  } else {
    go(t, level, out);
  }
}

void go(const term& t, int level, std::string& out) {
  switch (t.kind) {
    case term_kind::variable:
      out += t.name;
      return;
    case term_kind::boolean:
      out += t.flag ? "t" : "f";
      return;
    case term_kind::pair_value: {
      out += "<";
      const term* cur = &t;
      while (true) {
        emit(*cur->children[0], 0, out);
        out += ", ";
        if (cur->children[1]->kind == term_kind::pair_value) {
          cur = cur->children[1].get();
          continue;
        }
        emit(*cur->children[1], 0, out);
        break;
      }
      out += ">";
      return;
    }
    case term_kind::bang:
      out += "!";
      emit(*t.children[0], 2, out);
      return;
    case term_kind::abstraction:
      out += "\\" + t.binder + ". ";
      emit(*t.children[0], 0, out);
      return;
    case term_kind::sample:
      out += "sample bern(" + t.prob.to_string() + ")";
      return;
    case term_kind::case_of: {
      out += "case ";
      emit(*t.children[0], 1, out);
      out += " of { ";
      for (std::size_t i = 0; i < t.clauses.size(); ++i) {
        if (i) out += "; ";
        out += pattern_text(index_pattern(static_cast<int>(i), t.case_arity));
        out += " => sample bern(" + t.clauses[i].to_string() + ")";
      }
      out += " }";
      return;
    }
    case term_kind::observe:
      out += "obs(" + t.name + " = " + (t.flag ? "t" : "f") + ")";
      return;
    case term_kind::let_in:
      out += "let " + t.binder + " = ";
      emit(*t.children[0], 1, out);
      out += " in\n";
      emit(*t.children[1], 0, out);
      return;
    case term_kind::letp_in:
      out += "letp <" + t.binder + ", " + t.binder2 + "> = ";
      emit(*t.children[0], 1, out);
      out += " in\n";
      emit(*t.children[1], 0, out);
      return;
    case term_kind::application:
      emit(*t.children[0], 1, out);
      out += " ";
      emit(*t.children[1], 2, out);
      return;
    case term_kind::der:
      out += "der ";
      emit(*t.children[0], 2, out);
      return;
  }
  throw internal_error("unhandled term node");
}

}  // namespace

std::string pretty(const term& t) {
  std::string out;
  go(t, 0, out);
  return out;
}

}  // namespace hobn
