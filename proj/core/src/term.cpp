#include "hobn/term.hpp"

#include <algorithm>
#include <map>

#include "hobn/error.hpp"

namespace hobn {

namespace {

term_ptr make(term t) { return std::make_shared<const term>(std::move(t)); }

}  // namespace

term_ptr mk_var(std::string name) {
  term t;
  t.kind = term_kind::variable;
  t.name = std::move(name);
  return make(std::move(t));
}

term_ptr mk_bool(bool b) {
  term t;
  t.kind = term_kind::boolean;
  t.flag = b;
  return make(std::move(t));
}

term_ptr mk_pair(term_ptr l, term_ptr r) {
  term t;
  t.kind = term_kind::pair_value;
  t.children = {std::move(l), std::move(r)};
  return make(std::move(t));
}

term_ptr mk_bang(term_ptr body) {
  term t;
  t.kind = term_kind::bang;
  t.children = {std::move(body)};
  return make(std::move(t));
}

term_ptr mk_abs(std::string binder, term_ptr body) {
  term t;
  t.kind = term_kind::abstraction;
  t.binder = std::move(binder);
  t.children = {std::move(body)};
  return make(std::move(t));
}

term_ptr mk_sample(rational p) {
  term t;
  t.kind = term_kind::sample;
  t.prob = p;
  return make(std::move(t));
}

term_ptr mk_case(term_ptr scrutinee, int arity, std::vector<rational> clauses) {
  if (static_cast<int>(clauses.size()) != (1 << arity))
    throw internal_error("case clause count does not match arity");
  term t;
  t.kind = term_kind::case_of;
  t.case_arity = arity;
  t.clauses = std::move(clauses);
  t.children = {std::move(scrutinee)};
  return make(std::move(t));
}

term_ptr mk_observe(std::string var, bool value) {
  term t;
  t.kind = term_kind::observe;
  t.name = std::move(var);
  t.flag = value;
  return make(std::move(t));
}

term_ptr mk_let(std::string binder, term_ptr bound, term_ptr body) {
  term t;
  t.kind = term_kind::let_in;
  t.binder = std::move(binder);
  t.children = {std::move(bound), std::move(body)};
  return make(std::move(t));
}

term_ptr mk_letp(std::string b1, std::string b2, term_ptr scrutinee,
                 term_ptr body) {
  term t;
  t.kind = term_kind::letp_in;
  t.binder = std::move(b1);
  t.binder2 = std::move(b2);
  t.children = {std::move(scrutinee), std::move(body)};
  return make(std::move(t));
}

term_ptr mk_app(term_ptr fun, term_ptr arg) {
  term t;
  t.kind = term_kind::application;
  t.children = {std::move(fun), std::move(arg)};
  return make(std::move(t));
}

term_ptr mk_der(term_ptr arg) {
  term t;
  t.kind = term_kind::der;
  t.children = {std::move(arg)};
  return make(std::move(t));
}

bool is_value(const term& t) {
  switch (t.kind) {
    case term_kind::variable:
    case term_kind::boolean:
    case term_kind::bang:
    case term_kind::abstraction:
      return true;
    case term_kind::pair_value:
      return is_value(*t.children[0]) && is_value(*t.children[1]);
    default:
      return false;
  }
}

bool is_low_level(const term& t) {
  switch (t.kind) {
    case term_kind::bang:
    case term_kind::abstraction:
    case term_kind::application:
    case term_kind::der:
      return false;
    default:
      break;
  }
  return std::all_of(t.children.begin(), t.children.end(),
                     [](const term_ptr& c) { return is_low_level(*c); });
}

namespace {

void free_vars_into(const term& t, std::set<std::string>& bound,
                    std::set<std::string>& out) {
  switch (t.kind) {
    case term_kind::variable:
      if (!bound.count(t.name)) out.insert(t.name);
      return;
    case term_kind::observe:
      if (!bound.count(t.name)) out.insert(t.name);
      return;
    case term_kind::abstraction: {
      bool fresh = bound.insert(t.binder).second;
      free_vars_into(*t.children[0], bound, out);
      if (fresh) bound.erase(t.binder);
      return;
    }
    case term_kind::let_in: {
      free_vars_into(*t.children[0], bound, out);
      bool fresh = bound.insert(t.binder).second;
      free_vars_into(*t.children[1], bound, out);
      if (fresh) bound.erase(t.binder);
      return;
    }
    case term_kind::letp_in: {
      free_vars_into(*t.children[0], bound, out);
      bool f1 = bound.insert(t.binder).second;
      bool f2 = bound.insert(t.binder2).second;
      free_vars_into(*t.children[1], bound, out);
      if (f2) bound.erase(t.binder2);
      if (f1) bound.erase(t.binder);
      return;
    }
    default:
      for (const auto& c : t.children) free_vars_into(*c, bound, out);
  }
}

void all_names_into(const term& t, std::set<std::string>& out) {
  if (!t.name.empty()) out.insert(t.name);
  if (!t.binder.empty()) out.insert(t.binder);
  if (!t.binder2.empty()) out.insert(t.binder2);
  for (const auto& c : t.children) all_names_into(*c, out);
}

}  // namespace

std::set<std::string> free_vars(const term& t) {
  std::set<std::string> bound, out;
  free_vars_into(t, bound, out);
  return out;
}

std::set<std::string> all_names(const term& t) {
  std::set<std::string> out;
  all_names_into(t, out);
  return out;
}

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& avoid) {
  std::string candidate = base + "'";
  while (avoid.count(candidate)) candidate += "'";
  return candidate;
}

namespace {

term_ptr subst(const term_ptr& t, const std::string& var,
               const term_ptr& value, const std::set<std::string>& value_fv);

term_ptr subst_under_binder(const term_ptr& body, std::string& binder,
                            const std::string& var, const term_ptr& value,
                            const std::set<std::string>& value_fv) {
  if (binder == var) return body;
  if (!value_fv.count(binder)) return subst(body, var, value, value_fv);
  if (!free_vars(*body).count(var)) return body;
  std::set<std::string> avoid = value_fv;
  auto body_names = all_names(*body);
  avoid.insert(body_names.begin(), body_names.end());
  avoid.insert(var);
  std::string renamed = fresh_name(binder, avoid);
  term_ptr fresh_body = substitute(body, binder, mk_var(renamed));
  binder = renamed;
  return subst(fresh_body, var, value, value_fv);
}

term_ptr subst(const term_ptr& t, const std::string& var,
               const term_ptr& value, const std::set<std::string>& value_fv) {
  switch (t->kind) {
    case term_kind::variable:
      return t->name == var ? value : t;
    case term_kind::boolean:
    case term_kind::sample:
      return t;
    case term_kind::observe: {
      if (t->name != var) return t;
      if (value->kind != term_kind::variable)
        throw internal_error("substituting a non-variable into an observation");
      return mk_observe(value->name, t->flag);
    }
    case term_kind::pair_value:
      return mk_pair(subst(t->children[0], var, value, value_fv),
                     subst(t->children[1], var, value, value_fv));
    case term_kind::bang:
      return mk_bang(subst(t->children[0], var, value, value_fv));
    case term_kind::der:
      return mk_der(subst(t->children[0], var, value, value_fv));
    case term_kind::application:
      return mk_app(subst(t->children[0], var, value, value_fv),
                    subst(t->children[1], var, value, value_fv));
    case term_kind::case_of:
      return mk_case(subst(t->children[0], var, value, value_fv),
                     t->case_arity, t->clauses);
    case term_kind::abstraction: {
      std::string binder = t->binder;
      term_ptr body =
          subst_under_binder(t->children[0], binder, var, value, value_fv);
      return body == t->children[0] && binder == t->binder
                 ? t
                 : mk_abs(binder, body);
    }
    case term_kind::let_in: {
      term_ptr bound = subst(t->children[0], var, value, value_fv);
      std::string binder = t->binder;
      term_ptr body =
          subst_under_binder(t->children[1], binder, var, value, value_fv);
      return mk_let(binder, bound, body);
    }
    case term_kind::letp_in: {
      term_ptr scrut = subst(t->children[0], var, value, value_fv);
      std::string b1 = t->binder;
      std::string b2 = t->binder2;
      term_ptr body = t->children[1];
      if (b1 != var && b2 != var) {
        for (auto* b : {&b1, &b2}) {
          if (!value_fv.count(*b)) continue;
          std::set<std::string> avoid = value_fv;
          auto names = all_names(*body);
          avoid.insert(names.begin(), names.end());
          avoid.insert(var);
          avoid.insert(b1);
          avoid.insert(b2);
          std::string renamed = fresh_name(*b, avoid);
          body = substitute(body, *b, mk_var(renamed));
          *b = renamed;
        }
        body = subst(body, var, value, value_fv);
      }
      return mk_letp(b1, b2, scrut, body);
    }
  }
  throw internal_error("substitute: unknown term kind");
}

}  // namespace

term_ptr substitute(const term_ptr& t, const std::string& var,
                    const term_ptr& value) {
  return subst(t, var, value, free_vars(*value));
}

bool equal(const term& a, const term& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.name != b.name || a.binder != b.binder ||
      a.binder2 != b.binder2 || a.flag != b.flag || !(a.prob == b.prob) ||
      a.case_arity != b.case_arity || a.clauses != b.clauses ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!equal(*a.children[i], *b.children[i])) return false;
  return true;
}

namespace {

bool alpha_eq(const term& a, const term& b, std::map<std::string, std::string>& ab,
              std::map<std::string, std::string>& ba);

bool var_match(const std::string& x, const std::string& y,
               std::map<std::string, std::string>& ab,
               std::map<std::string, std::string>& ba) {
  auto ia = ab.find(x);
  auto ib = ba.find(y);
  if (ia == ab.end() && ib == ba.end()) return x == y;
  return ia != ab.end() && ib != ba.end() && ia->second == y && ib->second == x;
}

struct binder_scope {
  std::map<std::string, std::string>& ab;
  std::map<std::string, std::string>& ba;
  std::string xa, xb;
  bool had_a, had_b;
  std::string old_a, old_b;
  binder_scope(std::map<std::string, std::string>& ab,
               std::map<std::string, std::string>& ba, std::string xa,
               std::string xb)
      : ab(ab), ba(ba), xa(std::move(xa)), xb(std::move(xb)) {
    had_a = ab.count(this->xa);
    had_b = ba.count(this->xb);
    if (had_a) old_a = ab[this->xa];
    if (had_b) old_b = ba[this->xb];
    ab[this->xa] = this->xb;
    ba[this->xb] = this->xa;
  }
  ~binder_scope() {
    if (had_a)
      ab[xa] = old_a;
    else
      ab.erase(xa);
    if (had_b)
      ba[xb] = old_b;
    else
      ba.erase(xb);
  }
};

bool alpha_eq(const term& a, const term& b, std::map<std::string, std::string>& ab,
              std::map<std::string, std::string>& ba) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case term_kind::variable:
      return var_match(a.name, b.name, ab, ba);
    case term_kind::observe:
      return a.flag == b.flag && var_match(a.name, b.name, ab, ba);
    case term_kind::boolean:
      return a.flag == b.flag;
    case term_kind::sample:
      return a.prob == b.prob;
    case term_kind::case_of:
      return a.case_arity == b.case_arity && a.clauses == b.clauses &&
             alpha_eq(*a.children[0], *b.children[0], ab, ba);
    case term_kind::pair_value:
    case term_kind::application:
      return alpha_eq(*a.children[0], *b.children[0], ab, ba) &&
             alpha_eq(*a.children[1], *b.children[1], ab, ba);
    case term_kind::bang:
    case term_kind::der:
      return alpha_eq(*a.children[0], *b.children[0], ab, ba);
    case term_kind::abstraction: {
      binder_scope s(ab, ba, a.binder, b.binder);
      return alpha_eq(*a.children[0], *b.children[0], ab, ba);
    }
    case term_kind::let_in: {
      if (!alpha_eq(*a.children[0], *b.children[0], ab, ba)) return false;
      binder_scope s(ab, ba, a.binder, b.binder);
      return alpha_eq(*a.children[1], *b.children[1], ab, ba);
    }
    case term_kind::letp_in: {
      if (!alpha_eq(*a.children[0], *b.children[0], ab, ba)) return false;
      binder_scope s1(ab, ba, a.binder, b.binder);
      binder_scope s2(ab, ba, a.binder2, b.binder2);
      return alpha_eq(*a.children[1], *b.children[1], ab, ba);
    }
  }
  return false;
}

}  // namespace

bool alpha_equal(const term& a, const term& b) {
  std::map<std::string, std::string> ab, ba;
  return alpha_eq(a, b, ab, ba);
}

void flatten_pair_tree(const term_ptr& t, std::vector<term_ptr>& out) {
  if (t->kind == term_kind::pair_value) {
    flatten_pair_tree(t->children[0], out);
    flatten_pair_tree(t->children[1], out);
  } else {
    out.push_back(t);
  }
}

int pattern_index(const std::vector<bool>& pattern) {
  int idx = 0;
  for (bool b : pattern) idx = (idx << 1) | (b ? 1 : 0);
  return idx;
}

std::vector<bool> index_pattern(int index, int arity) {
  std::vector<bool> out(arity);
  for (int i = 0; i < arity; ++i)
    out[i] = ((index >> (arity - 1 - i)) & 1) != 0;
  return out;
}

}  // namespace hobn
