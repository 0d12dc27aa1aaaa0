#include "hobn/derivation.hpp"

#include <functional>

#include "hobn/error.hpp"

namespace hobn {

namespace {

deriv_ptr node(derivation d) {
  return std::make_shared<const derivation>(std::move(d));
}

void merge_ground(std::map<std::string, itype_ptr>& into,
                  const std::map<std::string, itype_ptr>& from) {
  for (const auto& [var, ty] : from) {
    auto it = into.find(var);
    if (it == into.end())
      into.emplace(var, ty);
    else if (!equal_types(*it->second, *ty))
      throw internal_error("ground context disagreement on " + var);
  }
}

void merge_multiset(std::map<std::string, std::vector<itype_ptr>>& into,
                    const std::map<std::string, std::vector<itype_ptr>>& from) {
  for (const auto& [var, elems] : from) {
    auto& slot = into[var];
    slot.insert(slot.end(), elems.begin(), elems.end());
  }
}

void drop_binder(judgment& j, const std::string& binder) {
  j.ground_ctx.erase(binder);
  j.multiset_ctx.erase(binder);
}

void expect(bool ok, const char* what) {
  if (!ok) throw internal_error(what);
}

// Binder entry in a premise context must match the type the binder was
// given; an absent entry means the binder is unused there.
void expect_entry(const judgment& j, const std::string& binder,
                  const itype& ty) {
  auto g = j.ground_ctx.find(binder);
  if (g != j.ground_ctx.end()) {
    expect(equal_types(*g->second, ty), "binder entry type mismatch");
    return;
  }
  auto m = j.multiset_ctx.find(binder);
  if (m != j.multiset_ctx.end()) {
    expect(ty.kind == itype_kind::multiset &&
               equal_types(*mk_multiset(m->second), ty),
           "binder entry type mismatch");
  }
}

}  // namespace

bool is_probabilistic_axiom(const derivation& d) {
  return d.rule == tyrule::sample_axiom || d.rule == tyrule::cond_axiom;
}

const std::string& main_name(const derivation& d) {
  expect(is_probabilistic_axiom(d) &&
             d.concl.type->kind == itype_kind::atomic,
         "main name of a non-axiom");
  return d.concl.type->at.name;
}

void collect_axioms(const deriv_ptr& d, std::vector<deriv_ptr>& out) {
  if (is_probabilistic_axiom(*d)) out.push_back(d);
  for (const auto& p : d->premises) collect_axioms(p, out);
}

std::set<std::string> judgment_names(const judgment& j) {
  std::set<std::string> out;
  for (const auto& [var, ty] : j.ground_ctx) names_into(*ty, out);
  for (const auto& [var, elems] : j.multiset_ctx)
    for (const auto& e : elems) names_into(*e, out);
  if (j.type) names_into(*j.type, out);
  return out;
}

std::set<std::string> derivation_names(const derivation& d) {
  std::set<std::string> out = judgment_names(d.concl);
  for (const auto& p : d.premises) {
    auto sub = derivation_names(*p);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

std::uint64_t measure(const derivation& d) {
  std::uint64_t total = 0;
  switch (d.rule) {
    case tyrule::let_bind:
    case tyrule::force:
      total = 1;
      break;
    case tyrule::apply:
      total = 2;
      break;
    case tyrule::letp_split:
      total = 3;
      break;
    default:
      break;
  }
  for (const auto& p : d.premises) total += measure(*p);
  return total;
}

deriv_ptr make_sample_axiom(term_ptr subject, itype_ptr at) {
  expect(subject->kind == term_kind::sample, "sample axiom subject");
  expect(at->kind == itype_kind::atomic, "sample axiom type");
  derivation d;
  d.rule = tyrule::sample_axiom;
  d.concl = {{}, {}, std::move(subject), std::move(at)};
  return node(std::move(d));
}

deriv_ptr make_cond_axiom(term_ptr subject, itype_ptr at,
                          std::map<std::string, itype_ptr> parents) {
  expect(subject->kind == term_kind::case_of, "conditional axiom subject");
  expect(at->kind == itype_kind::atomic, "conditional axiom type");
  for (const auto& [var, ty] : parents)
    expect(ty->kind == itype_kind::atomic, "conditional parent type");
  derivation d;
  d.rule = tyrule::cond_axiom;
  d.concl = {std::move(parents), {}, std::move(subject), std::move(at)};
  return node(std::move(d));
}

deriv_ptr make_var_axiom(std::string var, itype_ptr type) {
  expect(is_positive(*type), "variable type must be positive");
  derivation d;
  d.rule = tyrule::var_axiom;
  d.concl.subject = mk_var(var);
  d.concl.type = type;
  if (type->kind == itype_kind::multiset) {
    if (!type->parts.empty()) d.concl.multiset_ctx[var] = type->parts;
  } else {
    d.concl.ground_ctx[var] = type;
  }
  return node(std::move(d));
}

deriv_ptr make_obs_axiom(std::string var, itype_ptr at) {
  expect(at->kind == itype_kind::atomic && at->at.observed.has_value(),
         "observation type must be an observed atom");
  derivation d;
  d.rule = tyrule::obs_axiom;
  d.concl.subject = mk_observe(var, at->at.observed.value());
  d.concl.ground_ctx[var] = at;
  d.concl.type = at;
  return node(std::move(d));
}

deriv_ptr make_pair(deriv_ptr l, deriv_ptr r, term_ptr subject) {
  expect(subject->kind == term_kind::pair_value, "pair subject");
  expect(is_ground(*l->concl.type) && is_ground(*r->concl.type),
         "pair components must be ground");
  expect(l->concl.multiset_ctx.empty() && r->concl.multiset_ctx.empty(),
         "pair premises take no multiset context");
  derivation d;
  d.rule = tyrule::pair_intro;
  d.concl.subject = std::move(subject);
  d.concl.type = mk_tensor(l->concl.type, r->concl.type);
  merge_ground(d.concl.ground_ctx, l->concl.ground_ctx);
  merge_ground(d.concl.ground_ctx, r->concl.ground_ctx);
  d.premises = {std::move(l), std::move(r)};
  return node(std::move(d));
}

deriv_ptr make_letp(deriv_ptr scrut, deriv_ptr body, term_ptr subject) {
  expect(subject->kind == term_kind::letp_in, "letp subject");
  expect(scrut->concl.type->kind == itype_kind::tensor,
         "letp scrutinee must have a tensor type");
  expect_entry(body->concl, subject->binder, *scrut->concl.type->parts[0]);
  expect_entry(body->concl, subject->binder2, *scrut->concl.type->parts[1]);
  derivation d;
  d.rule = tyrule::letp_split;
  d.concl = body->concl;
  d.concl.subject = subject;
  drop_binder(d.concl, subject->binder);
  drop_binder(d.concl, subject->binder2);
  merge_ground(d.concl.ground_ctx, scrut->concl.ground_ctx);
  merge_multiset(d.concl.multiset_ctx, scrut->concl.multiset_ctx);
  d.premises = {std::move(scrut), std::move(body)};
  return node(std::move(d));
}

deriv_ptr make_let(deriv_ptr bound, deriv_ptr body, term_ptr subject) {
  expect(subject->kind == term_kind::let_in, "let subject");
  expect(is_positive(*bound->concl.type), "let binds positive types");
  expect_entry(body->concl, subject->binder, *bound->concl.type);
  derivation d;
  d.rule = tyrule::let_bind;
  d.concl = body->concl;
  d.concl.subject = subject;
  drop_binder(d.concl, subject->binder);
  merge_ground(d.concl.ground_ctx, bound->concl.ground_ctx);
  merge_multiset(d.concl.multiset_ctx, bound->concl.multiset_ctx);
  d.premises = {std::move(bound), std::move(body)};
  return node(std::move(d));
}

deriv_ptr make_lambda(deriv_ptr body, itype_ptr domain, term_ptr subject) {
  expect(subject->kind == term_kind::abstraction, "lambda subject");
  expect(is_positive(*domain), "lambda domain must be positive");
  expect_entry(body->concl, subject->binder, *domain);
  derivation d;
  d.rule = tyrule::lambda;
  d.concl = body->concl;
  d.concl.subject = subject;
  drop_binder(d.concl, subject->binder);
  d.concl.type = mk_arrow(std::move(domain), body->concl.type);
  d.premises = {std::move(body)};
  return node(std::move(d));
}

deriv_ptr make_apply(deriv_ptr fun, deriv_ptr arg, term_ptr subject) {
  expect(subject->kind == term_kind::application, "apply subject");
  expect(fun->concl.type->kind == itype_kind::arrow,
         "applying a non-arrow");
  expect(equal_types(*fun->concl.type->parts[0], *arg->concl.type),
         "argument type mismatch");
  derivation d;
  d.rule = tyrule::apply;
  d.concl.subject = std::move(subject);
  d.concl.type = fun->concl.type->parts[1];
  d.concl.ground_ctx = fun->concl.ground_ctx;
  merge_ground(d.concl.ground_ctx, arg->concl.ground_ctx);
  d.concl.multiset_ctx = fun->concl.multiset_ctx;
  merge_multiset(d.concl.multiset_ctx, arg->concl.multiset_ctx);
  d.premises = {std::move(fun), std::move(arg)};
  return node(std::move(d));
}

deriv_ptr make_bang(std::vector<deriv_ptr> premises, term_ptr subject) {
  expect(subject->kind == term_kind::bang, "bang subject");
  derivation d;
  d.rule = tyrule::bang_multi;
  d.concl.subject = std::move(subject);
  std::vector<itype_ptr> elems;
  for (const auto& p : premises) {
    elems.push_back(p->concl.type);
    merge_ground(d.concl.ground_ctx, p->concl.ground_ctx);
    merge_multiset(d.concl.multiset_ctx, p->concl.multiset_ctx);
  }
  d.concl.type = mk_multiset(std::move(elems));
  d.premises = std::move(premises);
  return node(std::move(d));
}

deriv_ptr make_force(deriv_ptr premise, term_ptr subject) {
  expect(subject->kind == term_kind::der, "force subject");
  expect(premise->concl.type->kind == itype_kind::multiset &&
             premise->concl.type->parts.size() == 1,
         "forcing a non-singleton multiset");
  derivation d;
  d.rule = tyrule::force;
  d.concl = premise->concl;
  d.concl.subject = std::move(subject);
  d.concl.type = premise->concl.type->parts[0];
  d.premises = {std::move(premise)};
  return node(std::move(d));
}

namespace {

itype_ptr map_atoms(const itype_ptr& t,
                    const std::function<atom(const atom&)>& f) {
  switch (t->kind) {
    case itype_kind::atomic: {
      atom mapped = f(t->at);
      if (mapped == t->at) return t;
      return mk_atom(mapped.name, mapped.observed);
    }
    case itype_kind::tensor:
      return mk_tensor(map_atoms(t->parts[0], f), map_atoms(t->parts[1], f));
    case itype_kind::multiset: {
      std::vector<itype_ptr> elems;
      for (const auto& e : t->parts) elems.push_back(map_atoms(e, f));
      return mk_multiset(std::move(elems));
    }
    case itype_kind::arrow:
      return mk_arrow(map_atoms(t->parts[0], f), map_atoms(t->parts[1], f));
  }
  throw internal_error("unhandled type node");
}

deriv_ptr map_derivation_atoms(const deriv_ptr& d,
                               const std::function<atom(const atom&)>& f) {
  derivation copy = *d;
  copy.concl.type = map_atoms(d->concl.type, f);
  for (auto& [var, ty] : copy.concl.ground_ctx) ty = map_atoms(ty, f);
  for (auto& [var, elems] : copy.concl.multiset_ctx)
    for (auto& e : elems) e = map_atoms(e, f);
  copy.premises.clear();
  for (const auto& p : d->premises)
    copy.premises.push_back(map_derivation_atoms(p, f));
  return node(std::move(copy));
}

}  // namespace

deriv_ptr rename_names(const deriv_ptr& d,
                       const std::map<std::string, std::string>& m) {
  return map_derivation_atoms(d, [&m](const atom& a) {
    auto it = m.find(a.name);
    return it == m.end() ? a : atom{it->second, a.observed};
  });
}

deriv_ptr set_observed(const deriv_ptr& d,
                       const std::map<std::string, bool>& m) {
  return map_derivation_atoms(d, [&m](const atom& a) {
    auto it = m.find(a.name);
    if (it == m.end()) return atom{a.name, std::nullopt};
    return atom{a.name, it->second};
  });
}

deriv_ptr canonical_names(const deriv_ptr& d) {
  std::vector<deriv_ptr> axioms;
  collect_axioms(d, axioms);
  std::set<std::string> other = derivation_names(*d);
  for (const auto& ax : axioms) other.erase(main_name(*ax));
  std::map<std::string, std::string> renaming;
  int next = 0;
  for (const auto& ax : axioms) {
    std::string candidate;
    do {
      candidate = "X" + std::to_string(next++);
    } while (other.count(candidate));
    renaming[main_name(*ax)] = candidate;
  }
  return rename_names(d, renaming);
}

deriv_ptr rename_free_var(const deriv_ptr& d, const std::string& from,
                          const std::string& to) {
  derivation copy = *d;
  copy.concl.subject = substitute(d->concl.subject, from, mk_var(to));
  auto g = copy.concl.ground_ctx.extract(from);
  if (!g.empty()) {
    g.key() = to;
    copy.concl.ground_ctx.insert(std::move(g));
  }
  auto m = copy.concl.multiset_ctx.extract(from);
  if (!m.empty()) {
    m.key() = to;
    copy.concl.multiset_ctx.insert(std::move(m));
  }
  copy.premises.clear();
  for (const auto& p : d->premises)
    copy.premises.push_back(rename_free_var(p, from, to));
  return node(std::move(copy));
}

const char* rule_label(tyrule r) {
  switch (r) {
    case tyrule::sample_axiom:
      return "sample";
    case tyrule::cond_axiom:
      return "cond";
    case tyrule::var_axiom:
      return "var";
    case tyrule::obs_axiom:
      return "obs";
    case tyrule::pair_intro:
      return "pair";
    case tyrule::letp_split:
      return "letp";
    case tyrule::let_bind:
      return "let";
    case tyrule::lambda:
      return "abs";
    case tyrule::apply:
      return "app";
    case tyrule::bang_multi:
      return "bang";
    case tyrule::force:
      return "der";
  }
  return "?";
}

namespace {

std::string one_line(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == '\n') c = ' ';
  return out;
}

std::string judgment_text(const judgment& j) {
  std::string out;
  bool first = true;
  for (const auto& [var, ty] : j.ground_ctx) {
    if (!first) out += ", ";
    out += var + ": " + type_to_string(*ty);
    first = false;
  }
  for (const auto& [var, elems] : j.multiset_ctx) {
    if (!first) out += ", ";
    out += var + ": " + type_to_string(*mk_multiset(elems));
    first = false;
  }
  out += " |- ";
  out += one_line(pretty(*j.subject));
  out += " : " + type_to_string(*j.type);
  return out;
}

void render(const derivation& d, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "[";
  out += rule_label(d.rule);
  out += "] ";
  out += judgment_text(d.concl);
  out += "\n";
  for (const auto& p : d.premises) render(*p, depth + 1, out);
}

}  // namespace

std::string derivation_to_text(const derivation& d) {
  std::string out;
  render(d, 0, out);
  return out;
}

}  // namespace hobn
