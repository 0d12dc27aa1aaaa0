#include <cstdint>
#include <set>
#include <vector>

#include "hobn/error.hpp"
#include "hobn/prelude.hpp"
#include "hobn/surface.hpp"
#include "hobn/term.hpp"

namespace hobn {

namespace {

surface_ptr node(surface_term t) {
  return std::make_shared<const surface_term>(std::move(t));
}

surface_ptr expand(const surface_ptr& s, std::set<std::string>& bound) {
  switch (s->kind) {
    case surface_kind::variable: {
      if (bound.count(s->name)) return s;
      auto& macros = prelude_macros();
      auto it = macros.find(s->name);
      return it == macros.end() ? s : it->second;
    }
    case surface_kind::numeral:
      return numeral_encoding(s->numeral);
    case surface_kind::boolean:
    case surface_kind::sample:
      return s;
    default:
      break;
  }
  std::vector<surface_ptr> kids;
  bool changed = false;
  for (std::size_t i = 0; i < s->children.size(); ++i) {
    std::vector<std::string> introduced;
    bool binds_here =
        (s->kind == surface_kind::abs && i == 0) ||
        ((s->kind == surface_kind::let_in || s->kind == surface_kind::letp_in) &&
         i == 1);
    if (binds_here) {
      for (const std::string& b : s->binders)
        if (bound.insert(b).second) introduced.push_back(b);
    }
    surface_ptr kid = expand(s->children[i], bound);
    for (const std::string& b : introduced) bound.erase(b);
    changed = changed || kid != s->children[i];
    kids.push_back(std::move(kid));
  }
  if (!changed) return s;
  surface_term copy = *s;
  copy.children = std::move(kids);
  return node(std::move(copy));
}

void collect_names(const surface_ptr& s, std::set<std::string>& out) {
  if (s->kind == surface_kind::variable) out.insert(s->name);
  for (const std::string& b : s->binders) out.insert(b);
  for (const auto& kid : s->children) collect_names(kid, out);
}

struct desugarer {
  std::set<std::string> used;
  std::uint64_t counter = 0;

  using binding = std::pair<std::string, term_ptr>;

  std::string fresh() {
    while (true) {
      std::string name = "_" + std::to_string(counter++);
      if (used.insert(name).second) return name;
    }
  }

  static term_ptr wrap(const std::vector<binding>& bs, term_ptr core) {
    for (auto it = bs.rbegin(); it != bs.rend(); ++it)
      core = mk_let(it->first, it->second, std::move(core));
    return core;
  }

  term_ptr value_of(const surface_ptr& s, std::vector<binding>& bs) {
    term_ptr t = lower(s);
    if (is_value(*t)) return t;
    std::string x = fresh();
    bs.emplace_back(x, std::move(t));
    return mk_var(x);
  }

  term_ptr lower(const surface_ptr& s) {
    switch (s->kind) {
      case surface_kind::variable:
        return mk_var(s->name);
      case surface_kind::boolean:
        return mk_bool(s->flag);
      case surface_kind::numeral:
        return lower(numeral_encoding(s->numeral));
      case surface_kind::sample:
        return mk_sample(s->prob);
      case surface_kind::tuple: {
        std::vector<binding> bs;
        std::vector<term_ptr> comps;
        for (const auto& kid : s->children) comps.push_back(value_of(kid, bs));
        term_ptr out = comps.back();
        for (std::size_t i = comps.size() - 1; i-- > 0;)
          out = mk_pair(comps[i], std::move(out));
        return wrap(bs, std::move(out));
      }
      case surface_kind::bang:
        return mk_bang(lower(s->children[0]));
      case surface_kind::der: {
        std::vector<binding> bs;
        term_ptr v = value_of(s->children[0], bs);
        return wrap(bs, mk_der(std::move(v)));
      }
      case surface_kind::abs:
        return mk_abs(s->binders[0], lower(s->children[0]));
      case surface_kind::app: {
        term_ptr fun = lower(s->children[0]);
        std::vector<binding> bs;
        term_ptr arg = value_of(s->children[1], bs);
        return wrap(bs, mk_app(std::move(fun), std::move(arg)));
      }
      case surface_kind::let_in:
        return mk_let(s->binders[0], lower(s->children[0]),
                      lower(s->children[1]));
      case surface_kind::letp_in: {
        std::vector<binding> bs;
        term_ptr scrut = value_of(s->children[0], bs);
        term_ptr body = lower(s->children[1]);
        term_ptr core = build_letp(s->binders, 0, std::move(scrut), body);
        return wrap(bs, std::move(core));
      }
      case surface_kind::case_of: {
        std::vector<binding> bs;
        term_ptr scrut = value_of(s->children[0], bs);
        return wrap(bs, mk_case(std::move(scrut), s->case_arity, s->clauses));
      }
      case surface_kind::observe: {
        term_ptr subject = lower(s->children[0]);
        if (subject->kind == term_kind::variable)
          return mk_observe(subject->name, s->flag);
        std::string x = fresh();
        return mk_let(x, std::move(subject), mk_observe(x, s->flag));
      }
    }
    throw internal_error("unhandled surface node");
  }

  term_ptr build_letp(const std::vector<std::string>& binders, std::size_t i,
                      term_ptr scrut, const term_ptr& body) {
    if (i + 2 == binders.size())
      return mk_letp(binders[i], binders[i + 1], std::move(scrut), body);
    std::string rest = fresh();
    term_ptr inner = build_letp(binders, i + 1, mk_var(rest), body);
    return mk_letp(binders[i], rest, std::move(scrut), std::move(inner));
  }
};

}  // namespace

surface_ptr expand_macros(const surface_ptr& s) {
  std::set<std::string> bound;
  return expand(s, bound);
}

term_ptr desugar(const surface_ptr& s) {
  desugarer d;
  collect_names(s, d.used);
  return d.lower(s);
}

}  // namespace hobn
