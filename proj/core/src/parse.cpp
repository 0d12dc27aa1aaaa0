#include <cctype>
#include <optional>

#include "hobn/error.hpp"
#include "hobn/surface.hpp"

namespace hobn {

namespace {

enum class tok_kind {
  ident,
  keyword,
  number,
  punct,
  end,
};

struct token {
  tok_kind kind;
  std::string text;
  int line, col;
};

const char* const keywords[] = {"let",  "letp", "in",  "sample", "bern",
                                "case", "of",   "der", "obs",    "t",
                                "f"};

bool is_keyword(const std::string& s) {
  for (const char* k : keywords)
    if (s == k) return true;
  return false;
}

struct lexer {
  const std::string& src;
  std::size_t pos = 0;
  int line = 1, col = 1;

  explicit lexer(const std::string& src) : src(src) {}

  void advance() {
    if (pos < src.size() && src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  std::vector<token> run() {
    std::vector<token> out;
    while (pos < src.size()) {
      char c = src[pos];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') advance();
        continue;
      }
      int tl = line, tc = col;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string text;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                src[pos] == '_' || src[pos] == '\'')) {
          text += src[pos];
          advance();
        }
        out.push_back({is_keyword(text) ? tok_kind::keyword : tok_kind::ident,
                       text, tl, tc});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string text;
        while (pos < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[pos]))) {
          text += src[pos];
          advance();
        }
        if (pos < src.size() && src[pos] == '.' && pos + 1 < src.size() &&
            std::isdigit(static_cast<unsigned char>(src[pos + 1]))) {
          text += '.';
          advance();
          while (pos < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[pos]))) {
            text += src[pos];
            advance();
          }
        } else if (pos < src.size() && src[pos] == '/' &&
                   pos + 1 < src.size() &&
                   std::isdigit(static_cast<unsigned char>(src[pos + 1]))) {
          text += '/';
          advance();
          while (pos < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[pos]))) {
            text += src[pos];
            advance();
          }
        }
        out.push_back({tok_kind::number, text, tl, tc});
        continue;
      }
      if (c == '=' && pos + 1 < src.size() && src[pos + 1] == '>') {
        advance();
        advance();
        out.push_back({tok_kind::punct, "=>", tl, tc});
        continue;
      }
      std::string p(1, c);
      if (p == "(" || p == ")" || p == "<" || p == ">" || p == "," ||
          p == ";" || p == "=" || p == "{" || p == "}" || p == "!" ||
          p == "\\" || p == ".") {
        advance();
        out.push_back({tok_kind::punct, p, tl, tc});
        continue;
      }
      throw syntax_error(tl, tc, "unexpected character '" + p + "'");
    }
    out.push_back({tok_kind::end, "", line, col});
    return out;
  }
};

surface_ptr node(surface_term t) {
  return std::make_shared<const surface_term>(std::move(t));
}

struct parser {
  std::vector<token> toks;
  std::size_t at = 0;

  const token& peek(std::size_t ahead = 0) const {
    std::size_t i = at + ahead;
    return i < toks.size() ? toks[i] : toks.back();
  }

  token next() {
    token t = peek();
    if (t.kind != tok_kind::end) ++at;
    return t;
  }

  [[noreturn]] void fail(const token& t, const std::string& msg) {
    throw syntax_error(t.line, t.col, msg);
  }

  bool at_punct(const std::string& p) const {
    return peek().kind == tok_kind::punct && peek().text == p;
  }

  bool at_keyword(const std::string& k) const {
    return peek().kind == tok_kind::keyword && peek().text == k;
  }

  void expect_punct(const std::string& p) {
    if (!at_punct(p)) fail(peek(), "expected '" + p + "'");
    next();
  }

  void expect_keyword(const std::string& k) {
    if (!at_keyword(k)) fail(peek(), "expected '" + k + "'");
    next();
  }

  std::string expect_ident() {
    if (peek().kind != tok_kind::ident) fail(peek(), "expected identifier");
    return next().text;
  }

  rational expect_probability() {
    if (peek().kind != tok_kind::number) fail(peek(), "expected a number");
    token t = next();
    auto r = rational::parse(t.text);
    if (!r) fail(t, "cannot parse number '" + t.text + "'");
    if (!r->in_unit_interval())
      fail(t, "probability " + t.text + " is outside [0, 1]");
    return *r;
  }

  bool starts_atom() const {
    const token& t = peek();
    if (t.kind == tok_kind::ident || t.kind == tok_kind::number) return true;
    if (t.kind == tok_kind::keyword) return t.text == "t" || t.text == "f";
    if (t.kind == tok_kind::punct)
      return t.text == "(" || t.text == "<" || t.text == "!";
    return false;
  }

  surface_ptr parse_term() {
    const token& t = peek();
    if (at_punct("\\")) {
      next();
      std::string binder = expect_ident();
      expect_punct(".");
      surface_term s;
      s.kind = surface_kind::abs;
      s.binders = {binder};
      s.children = {parse_term()};
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    if (at_keyword("let")) {
      next();
      std::string binder = expect_ident();
      expect_punct("=");
      surface_ptr bound = parse_term();
      expect_keyword("in");
      surface_term s;
      s.kind = surface_kind::let_in;
      s.binders = {binder};
      s.children = {bound, parse_term()};
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    if (at_keyword("letp")) {
      next();
      expect_punct("<");
      std::vector<std::string> binders;
      binders.push_back(expect_ident());
      while (at_punct(",")) {
        next();
        binders.push_back(expect_ident());
      }
      expect_punct(">");
      if (binders.size() < 2)
        fail(t, "letp pattern needs at least two components");
      for (std::size_t i = 0; i < binders.size(); ++i)
        for (std::size_t j = i + 1; j < binders.size(); ++j)
          if (binders[i] == binders[j])
            fail(t, "duplicate variable '" + binders[i] + "' in letp pattern");
      expect_punct("=");
      surface_ptr scrut = parse_term();
      expect_keyword("in");
      surface_term s;
      s.kind = surface_kind::letp_in;
      s.binders = std::move(binders);
      s.children = {scrut, parse_term()};
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    return parse_app();
  }

  surface_ptr parse_app() {
    surface_ptr head = parse_head();
    while (starts_atom()) {
      surface_term s;
      s.kind = surface_kind::app;
      s.line = head->line;
      s.col = head->col;
      surface_ptr arg = parse_atom();
      s.children = {head, arg};
      head = node(std::move(s));
    }
    return head;
  }

  surface_ptr parse_head() {
    const token& t = peek();
    if (at_keyword("der")) {
      next();
      surface_term s;
      s.kind = surface_kind::der;
      s.children = {parse_atom()};
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    if (at_keyword("sample")) {
      next();
      expect_keyword("bern");
      expect_punct("(");
      rational p = expect_probability();
      expect_punct(")");
      surface_term s;
      s.kind = surface_kind::sample;
      s.prob = p;
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    if (at_keyword("obs")) {
      next();
      expect_punct("(");
      surface_ptr subject = parse_term();
      expect_punct("=");
      bool value;
      if (at_keyword("t"))
        value = true;
      else if (at_keyword("f"))
        value = false;
      else
        fail(peek(), "expected 't' or 'f' in observation");
      next();
      expect_punct(")");
      surface_term s;
      s.kind = surface_kind::observe;
      s.flag = value;
      s.children = {subject};
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    if (at_keyword("case")) return parse_case();
    return parse_atom();
  }

  surface_ptr parse_case() {
    const token& t = peek();
    expect_keyword("case");
    surface_ptr scrut = parse_term();
    expect_keyword("of");
    expect_punct("{");
    std::vector<std::pair<std::vector<bool>, rational>> entries;
    int arity = -1;
    while (true) {
      token pt = peek();
      std::vector<bool> pattern = parse_pattern();
      if (arity < 0)
        arity = static_cast<int>(pattern.size());
      else if (static_cast<int>(pattern.size()) != arity)
        fail(pt, "case patterns have inconsistent arity");
      expect_punct("=>");
      token bt = peek();
      if (!at_keyword("sample"))
        fail(bt, "case clause body must be a sample expression");
      next();
      expect_keyword("bern");
      expect_punct("(");
      rational p = expect_probability();
      expect_punct(")");
      entries.emplace_back(std::move(pattern), p);
      if (at_punct(";")) {
        next();
        if (at_punct("}")) break;
        continue;
      }
      break;
    }
    expect_punct("}");
    if (arity > 16) fail(t, "case arity is too large");
    std::vector<std::optional<rational>> table(std::size_t(1) << arity);
    for (auto& [pattern, p] : entries) {
      int idx = pattern_index(pattern);
      if (table[idx])
        fail(t, "duplicate case clause for pattern " + pattern_text(pattern));
      table[idx] = p;
    }
    std::vector<rational> clauses;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!table[i])
        fail(t, "case is missing a clause for pattern " +
                    pattern_text(index_pattern(static_cast<int>(i), arity)));
      clauses.push_back(*table[i]);
    }
    surface_term s;
    s.kind = surface_kind::case_of;
    s.case_arity = arity;
    s.clauses = std::move(clauses);
    s.children = {scrut};
    s.line = t.line;
    s.col = t.col;
    return node(std::move(s));
  }

  static std::string pattern_text(const std::vector<bool>& pattern) {
    if (pattern.size() == 1) return pattern[0] ? "t" : "f";
    std::string out = "<";
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      if (i) out += ", ";
      out += pattern[i] ? "t" : "f";
    }
    return out + ">";
  }

  std::vector<bool> parse_pattern() {
    if (at_keyword("t") || at_keyword("f")) {
      bool b = next().text == "t";
      return {b};
    }
    if (at_punct("<")) {
      next();
      std::vector<bool> out;
      while (true) {
        if (at_keyword("t") || at_keyword("f"))
          out.push_back(next().text == "t");
        else
          fail(peek(), "expected 't' or 'f' in case pattern");
        if (at_punct(",")) {
          next();
          continue;
        }
        break;
      }
      expect_punct(">");
      return out;
    }
    fail(peek(), "expected case pattern");
  }

  surface_ptr parse_atom() {
    const token& t = peek();
    if (t.kind == tok_kind::ident) {
      next();
      surface_term s;
      s.kind = surface_kind::variable;
      s.name = t.text;
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    if (at_keyword("t") || at_keyword("f")) {
      next();
      surface_term s;
      s.kind = surface_kind::boolean;
      s.flag = t.text == "t";
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    if (t.kind == tok_kind::number) {
      next();
      if (t.text.find('.') != std::string::npos ||
          t.text.find('/') != std::string::npos)
        fail(t, "non-integer number outside bern(...)");
      surface_term s;
      s.kind = surface_kind::numeral;
      s.numeral = std::stoull(t.text);
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    if (at_punct("!")) {
      next();
      surface_term s;
      s.kind = surface_kind::bang;
      s.children = {parse_atom()};
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    if (at_punct("(")) {
      next();
      surface_ptr inner = parse_term();
      expect_punct(")");
      return inner;
    }
    if (at_punct("<")) {
      next();
      std::vector<surface_ptr> comps;
      comps.push_back(parse_term());
      while (at_punct(",")) {
        next();
        comps.push_back(parse_term());
      }
      expect_punct(">");
      if (comps.size() == 1) return comps[0];
      surface_term s;
      s.kind = surface_kind::tuple;
      s.children = std::move(comps);
      s.line = t.line;
      s.col = t.col;
      return node(std::move(s));
    }
    fail(t, "expected a term");
  }
};

}  // namespace

surface_ptr parse_surface(const std::string& source) {
  lexer lex(source);
  parser p{lex.run()};
  surface_ptr out = p.parse_term();
  if (p.peek().kind != tok_kind::end)
    p.fail(p.peek(), "trailing input after term");
  return out;
}

term_ptr parse_program(const std::string& source) {
  return desugar(expand_macros(parse_surface(source)));
}

}  // namespace hobn
