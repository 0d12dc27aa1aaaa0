#include "hobn/check.hpp"

#include <functional>
#include <optional>

#include "hobn/error.hpp"

namespace hobn {

namespace {

struct failure {
  std::string path;
  std::string message;
};

using maybe_failure = std::optional<failure>;

std::string path_of(const std::vector<int>& crumbs) {
  std::string out;
  for (int c : crumbs) {
    if (!out.empty()) out += ".";
    out += std::to_string(c);
  }
  return out.empty() ? "root" : out;
}

bool multiset_ctx_entry_equal(const std::vector<itype_ptr>& a,
                              const std::vector<itype_ptr>& b) {
  return equal_types(*mk_multiset(a), *mk_multiset(b));
}

bool judgment_matches(const judgment& got, const judgment& want) {
  if (!equal_types(*got.type, *want.type)) return false;
  if (got.ground_ctx.size() != want.ground_ctx.size()) return false;
  for (const auto& [var, ty] : want.ground_ctx) {
    auto it = got.ground_ctx.find(var);
    if (it == got.ground_ctx.end() || !equal_types(*it->second, *ty))
      return false;
  }
  if (got.multiset_ctx.size() != want.multiset_ctx.size()) return false;
  for (const auto& [var, elems] : want.multiset_ctx) {
    auto it = got.multiset_ctx.find(var);
    if (it == got.multiset_ctx.end() ||
        !multiset_ctx_entry_equal(it->second, elems))
      return false;
  }
  return true;
}

maybe_failure fail_at(const std::vector<int>& crumbs, std::string msg) {
  return failure{path_of(crumbs), std::move(msg)};
}

maybe_failure check_axiom_shape(const derivation& d,
                                const std::vector<int>& crumbs) {
  const judgment& j = d.concl;
  switch (d.rule) {
    case tyrule::sample_axiom:
      if (j.subject->kind != term_kind::sample)
        return fail_at(crumbs, "sample rule over a non-sample subject");
      if (j.type->kind != itype_kind::atomic)
        return fail_at(crumbs, "sample axiom must conclude an atom");
      if (!j.ground_ctx.empty() || !j.multiset_ctx.empty())
        return fail_at(crumbs, "sample axiom carries a context");
      return std::nullopt;
    case tyrule::cond_axiom: {
      if (j.subject->kind != term_kind::case_of)
        return fail_at(crumbs, "conditional rule over a non-case subject");
      if (j.type->kind != itype_kind::atomic)
        return fail_at(crumbs, "conditional axiom must conclude an atom");
      if (!j.multiset_ctx.empty())
        return fail_at(crumbs, "conditional axiom carries a multiset context");
      std::vector<term_ptr> leaves;
      flatten_pair_tree(j.subject->children[0], leaves);
      if (static_cast<int>(leaves.size()) != j.subject->case_arity)
        return fail_at(crumbs, "conditional scrutinee arity mismatch");
      std::set<std::string> parents;
      for (const auto& leaf : leaves) {
        if (leaf->kind != term_kind::variable)
          return fail_at(crumbs, "conditional scrutinee must be variables");
        parents.insert(leaf->name);
      }
      if (j.ground_ctx.size() != parents.size())
        return fail_at(crumbs, "conditional context must list its parents");
      for (const auto& p : parents) {
        auto it = j.ground_ctx.find(p);
        if (it == j.ground_ctx.end())
          return fail_at(crumbs, "conditional parent '" + p +
                                     "' missing from the context");
        if (it->second->kind != itype_kind::atomic)
          return fail_at(crumbs, "conditional parent '" + p +
                                     "' must have an atomic type");
        if (it->second->at.name == j.type->at.name)
          return fail_at(crumbs,
                         "conditional subject name occurs among its parents");
      }
      return std::nullopt;
    }
    case tyrule::var_axiom: {
      if (j.subject->kind != term_kind::variable)
        return fail_at(crumbs, "variable rule over a non-variable subject");
      if (!is_positive(*j.type))
        return fail_at(crumbs, "variables must have positive types");
      const std::string& x = j.subject->name;
      if (j.type->kind == itype_kind::multiset) {
        if (!j.ground_ctx.empty())
          return fail_at(crumbs, "variable context mismatch");
        if (j.type->parts.empty()) {
          if (!j.multiset_ctx.empty())
            return fail_at(crumbs, "variable context mismatch");
        } else if (j.multiset_ctx.size() != 1 ||
                   !j.multiset_ctx.count(x) ||
                   !multiset_ctx_entry_equal(j.multiset_ctx.at(x),
                                             j.type->parts)) {
          return fail_at(crumbs, "variable context mismatch");
        }
      } else {
        if (!j.multiset_ctx.empty() || j.ground_ctx.size() != 1 ||
            !j.ground_ctx.count(x) ||
            !equal_types(*j.ground_ctx.at(x), *j.type))
          return fail_at(crumbs, "variable context mismatch");
      }
      return std::nullopt;
    }
    case tyrule::obs_axiom: {
      if (j.subject->kind != term_kind::observe)
        return fail_at(crumbs, "observation rule over a non-observation");
      if (j.type->kind != itype_kind::atomic || !j.type->at.observed)
        return fail_at(crumbs, "observation must conclude an observed atom");
      if (j.type->at.observed.value() != j.subject->flag)
        return fail_at(crumbs, "observation mark disagrees with the subject");
      if (!j.multiset_ctx.empty() || j.ground_ctx.size() != 1)
        return fail_at(crumbs, "observation context mismatch");
      auto it = j.ground_ctx.find(j.subject->name);
      if (it == j.ground_ctx.end() || !equal_types(*it->second, *j.type))
        return fail_at(crumbs, "observation context mismatch");
      return std::nullopt;
    }
    default:
      return fail_at(crumbs, "axiom check on a non-axiom");
  }
}

maybe_failure check_node(const deriv_ptr& d, std::vector<int>& crumbs) {
  const judgment& j = d->concl;
  if (!j.subject || !j.type) return fail_at(crumbs, "incomplete judgment");
  for (const auto& [var, ty] : j.ground_ctx)
    if (!is_ground(*ty))
      return fail_at(crumbs,
                     "ground context entry '" + var + "' is not ground");
  for (const auto& [var, elems] : j.multiset_ctx)
    if (elems.empty())
      return fail_at(crumbs, "empty multiset entry stored for '" + var + "'");

  for (std::size_t i = 0; i < d->premises.size(); ++i) {
    crumbs.push_back(static_cast<int>(i));
    auto sub = check_node(d->premises[i], crumbs);
    crumbs.pop_back();
    if (sub) return sub;
  }

  auto premise_subject = [&](std::size_t i, const term_ptr& expected,
                             const char* what) -> maybe_failure {
    if (!equal(*d->premises[i]->concl.subject, *expected))
      return fail_at(crumbs, std::string("premise does not type the ") + what);
    return std::nullopt;
  };

  deriv_ptr rebuilt;
  try {
    switch (d->rule) {
      case tyrule::sample_axiom:
      case tyrule::cond_axiom:
      case tyrule::var_axiom:
      case tyrule::obs_axiom:
        if (!d->premises.empty())
          return fail_at(crumbs, "axiom with premises");
        return check_axiom_shape(*d, crumbs);
      case tyrule::pair_intro: {
        if (j.subject->kind != term_kind::pair_value ||
            d->premises.size() != 2)
          return fail_at(crumbs, "malformed pair node");
        if (auto f = premise_subject(0, j.subject->children[0], "left component"))
          return f;
        if (auto f = premise_subject(1, j.subject->children[1], "right component"))
          return f;
        rebuilt = make_pair(d->premises[0], d->premises[1], j.subject);
        break;
      }
      case tyrule::letp_split: {
        if (j.subject->kind != term_kind::letp_in || d->premises.size() != 2)
          return fail_at(crumbs, "malformed letp node");
        if (auto f = premise_subject(0, j.subject->children[0], "scrutinee"))
          return f;
        if (auto f = premise_subject(1, j.subject->children[1], "body"))
          return f;
        if (!is_ground(*d->premises[0]->concl.type))
          return fail_at(crumbs, "letp splits ground pairs only");
        rebuilt = make_letp(d->premises[0], d->premises[1], j.subject);
        break;
      }
      case tyrule::let_bind: {
        if (j.subject->kind != term_kind::let_in || d->premises.size() != 2)
          return fail_at(crumbs, "malformed let node");
        if (auto f = premise_subject(0, j.subject->children[0], "bound term"))
          return f;
        if (auto f = premise_subject(1, j.subject->children[1], "body"))
          return f;
        rebuilt = make_let(d->premises[0], d->premises[1], j.subject);
        break;
      }
      case tyrule::lambda: {
        if (j.subject->kind != term_kind::abstraction ||
            d->premises.size() != 1 || j.type->kind != itype_kind::arrow)
          return fail_at(crumbs, "malformed abstraction node");
        if (auto f = premise_subject(0, j.subject->children[0], "body"))
          return f;
        rebuilt = make_lambda(d->premises[0], j.type->parts[0], j.subject);
        break;
      }
      case tyrule::apply: {
        if (j.subject->kind != term_kind::application ||
            d->premises.size() != 2)
          return fail_at(crumbs, "malformed application node");
        if (auto f = premise_subject(0, j.subject->children[0], "function"))
          return f;
        if (auto f = premise_subject(1, j.subject->children[1], "argument"))
          return f;
        if (!is_positive(*d->premises[1]->concl.type))
          return fail_at(crumbs, "argument type must be positive");
        rebuilt = make_apply(d->premises[0], d->premises[1], j.subject);
        break;
      }
      case tyrule::bang_multi: {
        if (j.subject->kind != term_kind::bang)
          return fail_at(crumbs, "malformed thunk node");
        for (std::size_t i = 0; i < d->premises.size(); ++i)
          if (auto f = premise_subject(i, j.subject->children[0], "thunk body"))
            return f;
        rebuilt = make_bang(d->premises, j.subject);
        break;
      }
      case tyrule::force: {
        if (j.subject->kind != term_kind::der || d->premises.size() != 1)
          return fail_at(crumbs, "malformed force node");
        if (auto f = premise_subject(0, j.subject->children[0], "forced value"))
          return f;
        rebuilt = make_force(d->premises[0], j.subject);
        break;
      }
    }
  } catch (const internal_error& e) {
    return fail_at(crumbs, e.what());
  }
  if (!rebuilt) return fail_at(crumbs, "unhandled rule");
  if (!judgment_matches(j, rebuilt->concl))
    return fail_at(crumbs,
                   "conclusion judgment differs from what the rule yields");
  return std::nullopt;
}

maybe_failure check_names(const derivation& d) {
  std::vector<deriv_ptr> axioms;
  std::map<std::string, std::optional<bool>> statuses;

  struct walker {
    std::map<std::string, std::optional<bool>>& statuses;
    maybe_failure bad;

    void visit_type(const itype& t, const std::vector<int>& crumbs) {
      if (bad) return;
      if (t.kind == itype_kind::atomic) {
        auto [it, inserted] = statuses.emplace(t.at.name, t.at.observed);
        if (!inserted && it->second != t.at.observed)
          bad = fail_at(crumbs, "name " + t.at.name +
                                    " occurs with two observation statuses");
        return;
      }
      for (const auto& p : t.parts) visit_type(*p, crumbs);
    }

    void visit(const derivation& n, std::vector<int>& crumbs) {
      if (bad) return;
      for (const auto& [var, ty] : n.concl.ground_ctx)
        visit_type(*ty, crumbs);
      for (const auto& [var, elems] : n.concl.multiset_ctx)
        for (const auto& e : elems) visit_type(*e, crumbs);
      visit_type(*n.concl.type, crumbs);
      for (std::size_t i = 0; i < n.premises.size(); ++i) {
        crumbs.push_back(static_cast<int>(i));
        visit(*n.premises[i], crumbs);
        crumbs.pop_back();
      }
    }
  };

  walker w{statuses, std::nullopt};
  std::vector<int> crumbs;
  w.visit(d, crumbs);
  if (w.bad) return w.bad;

  std::set<std::string> seen;
  std::function<maybe_failure(const derivation&, std::vector<int>&)> scan =
      [&](const derivation& n, std::vector<int>& at) -> maybe_failure {
    if (is_probabilistic_axiom(n)) {
      if (!seen.insert(main_name(n)).second)
        return fail_at(at, "name " + main_name(n) +
                               " is introduced by two probabilistic axioms");
    }
    for (std::size_t i = 0; i < n.premises.size(); ++i) {
      at.push_back(static_cast<int>(i));
      auto f = scan(*n.premises[i], at);
      at.pop_back();
      if (f) return f;
    }
    return std::nullopt;
  };
  std::vector<int> at;
  return scan(d, at);
}

}  // namespace

check_result check(const deriv_ptr& d) {
  std::vector<int> crumbs;
  maybe_failure f = check_node(d, crumbs);
  if (!f) f = check_names(*d);
  if (!f) return {};
  return {false, f->path, f->message};
}

}  // namespace hobn
