#include "hobn/semantics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "hobn/error.hpp"
#include "hobn/term.hpp"

namespace hobn {

namespace {

void expect(bool ok, const char* what) {
  if (!ok) throw internal_error(what);
}

std::size_t unobserved_width(const factor& f) {
  std::size_t w = 0;
  for (const auto& a : f.scope)
    if (!a.observed) ++w;
  return w;
}

void note(interp_stats* st, const factor& f) {
  if (st) st->max_width = std::max(st->max_width, unobserved_width(f));
}

std::uint64_t pow2(std::size_t e) {
  return e >= 64 ? UINT64_MAX : std::uint64_t{1} << e;
}

cost_report report_from(const deriv_ptr& d, const interp_stats& st) {
  cost_report r;
  r.multiplications = st.ops.multiplications;
  r.additions = st.ops.additions;
  std::vector<deriv_ptr> axioms;
  collect_axioms(d, axioms);
  r.prob_axioms = axioms.size();
  std::set<std::string> names;
  for (const auto& a : axioms) {
    auto sub = judgment_names(a->concl);
    names.insert(sub.begin(), sub.end());
  }
  r.axiom_names = names.size();
  r.max_width = st.max_width;
  r.bound_global = r.prob_axioms * pow2(r.axiom_names);
  r.bound_inductive = r.prob_axioms * pow2(r.max_width);
  return r;
}

}  // namespace

factor axiom_factor(const derivation& d) {
  switch (d.rule) {
    case tyrule::sample_axiom: {
      const atom& a = d.concl.type->at;
      double p = d.concl.subject->prob.to_double();
      if (a.observed) return factor{{a}, {*a.observed ? p : 1 - p}};
      return factor{{a}, {1 - p, p}};
    }
    case tyrule::cond_axiom: {
      const atom& child = d.concl.type->at;
      factor f;
      f.scope.push_back(child);
      // Aliased parents share a name and hence a single scope slot.
      for (const auto& [var, ty] : d.concl.ground_ctx) {
        expect(ty->at.name != child.name, "conditional axiom reads itself");
        bool dup = false;
        for (const auto& a : f.scope)
          if (a.name == ty->at.name) {
            expect(a.observed == ty->at.observed,
                   "observation status disagrees within an axiom");
            dup = true;
          }
        if (!dup) f.scope.push_back(ty->at);
      }
      std::sort(f.scope.begin(), f.scope.end(),
                [](const atom& a, const atom& b) { return a.name < b.name; });

      // Argument order is the subject's, which may repeat variables.
      std::vector<term_ptr> leaves;
      flatten_pair_tree(d.concl.subject->children[0], leaves);
      std::vector<std::string> args;
      for (const auto& leaf : leaves) {
        expect(leaf->kind == term_kind::variable, "conditional argument");
        args.push_back(leaf->name);
      }

      f.table.assign(f.size(), 0.0);
      std::vector<bool> pattern(args.size());
      for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
        std::map<std::string, bool> val;
        std::size_t rest = idx;
        bool child_val = false;
        for (std::size_t i = f.scope.size(); i-- > 0;) {
          bool v;
          if (f.scope[i].observed) {
            v = *f.scope[i].observed;
          } else {
            v = rest & 1;
            rest >>= 1;
          }
          val[f.scope[i].name] = v;
          if (f.scope[i].name == child.name) child_val = v;
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
          auto it = d.concl.ground_ctx.find(args[i]);
          expect(it != d.concl.ground_ctx.end(), "unbound conditional parent");
          pattern[i] = val[it->second->at.name];
        }
        double p =
            d.concl.subject->clauses[pattern_index(pattern)].to_double();
        f.table[idx] = child_val ? p : 1 - p;
      }
      return f;
    }
    case tyrule::var_axiom:
    case tyrule::obs_axiom:
    case tyrule::pair_intro:
      return unit_factor();
    default:
      throw internal_error("no axiom factor for rule '" +
                           std::string(rule_label(d.rule)) + "'");
  }
}

factor interpret_global(const deriv_ptr& d, op_counter* ops) {
  std::vector<deriv_ptr> axioms;
  collect_axioms(d, axioms);
  factor acc = unit_factor();
  for (const auto& a : axioms) acc = product(acc, axiom_factor(*a), ops);
  auto keep = judgment_names(d->concl);
  std::set<std::string> drop;
  for (const auto& a : acc.scope)
    if (!keep.count(a.name)) drop.insert(a.name);
  return sum_out(acc, drop, ops);
}

bool check_compatibility(const std::vector<deriv_ptr>& premises) {
  if (premises.size() < 2) return true;
  std::vector<std::set<std::string>> seen, internal;
  for (const auto& p : premises) {
    auto names = derivation_names(*p);
    auto pub = judgment_names(p->concl);
    std::set<std::string> own;
    for (const auto& n : names)
      if (!pub.count(n)) own.insert(n);
    seen.push_back(std::move(names));
    internal.push_back(std::move(own));
  }
  for (std::size_t i = 0; i < premises.size(); ++i)
    for (std::size_t j = 0; j < premises.size(); ++j) {
      if (i == j) continue;
      for (const auto& n : internal[i])
        if (seen[j].count(n)) return false;
    }
  return true;
}

decorated_node interpret_inductive(const deriv_ptr& d, interp_stats* stats) {
  decorated_node out;
  out.node = d;
  if (d->premises.empty()) {
    // A thunk typed with the empty multiset is a leaf too: it denotes
    // the empty product.
    out.psi = d->rule == tyrule::bang_multi ? unit_factor() : axiom_factor(*d);
    note(stats, out.psi);
    return out;
  }
  for (const auto& p : d->premises)
    out.premises.push_back(interpret_inductive(p, stats));
  if (!check_compatibility(d->premises))
    throw internal_error("incompatible premises under a '" +
                         std::string(rule_label(d->rule)) + "' node");
  op_counter* ops = stats ? &stats->ops : nullptr;
  factor acc = out.premises[0].psi;
  for (std::size_t i = 1; i < out.premises.size(); ++i) {
    acc = product(acc, out.premises[i].psi, ops);
    note(stats, acc);
  }
  auto keep = judgment_names(d->concl);
  std::set<std::string> drop;
  for (const auto& a : acc.scope)
    if (!keep.count(a.name)) drop.insert(a.name);
  if (d->rule == tyrule::bang_multi)
    expect(drop.empty(), "a thunk discards live names");
  if (!drop.empty()) {
    acc = sum_out(acc, drop, ops);
    note(stats, acc);
  }
  out.psi = std::move(acc);
  return out;
}

cost_report cost(const deriv_ptr& d) {
  interp_stats st;
  interpret_inductive(d, &st);
  return report_from(d, st);
}

query_result posterior_query(const term_ptr& t, std::uint64_t fuel) {
  infer_result inf = infer_ground(t, fuel);
  if (!is_ground(*inf.deriv->concl.type))
    throw type_error("posterior queries need a ground result, got " +
                     type_to_string(*inf.deriv->concl.type));
  deriv_ptr compiled = infer_low(inf.reduction.normal_form);
  interp_stats st;
  decorated_node root = interpret_inductive(compiled, &st);
  query_result out;
  out.marginal = root.psi;
  auto [post, mass] = normalize_posterior(root.psi);
  out.posterior = std::move(post);
  out.evidence = mass;
  out.bn = extract_bn(compiled);
  out.cost = report_from(compiled, st);
  out.deriv = inf.deriv;
  out.compiled = std::move(compiled);
  return out;
}

}  // namespace hobn
