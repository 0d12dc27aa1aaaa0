#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hobn/error.hpp"
#include "hobn/infer.hpp"

// Inference for the full calculus: reduce to a normal form, type that,
// then replay the trace backwards.  Each replayed step rebuilds the
// derivation of the term before the step from the derivation of the term
// after it, undoing the substitution the step performed.

namespace hobn {

namespace {

using env_map = std::map<std::string, itype_ptr>;

void expect(bool ok, const char* what) {
  if (!ok) throw internal_error(what);
}

// One place a substituted value landed: the subderivation typing the
// copy, and the type it was used at.
struct occurrence {
  deriv_ptr deriv;
  itype_ptr type;
};

const std::string& mapped(const std::map<std::string, std::string>& m,
                          const std::string& name) {
  auto it = m.find(name);
  return it == m.end() ? name : it->second;
}

// Walks `s` (the term before a substitution of `value` for `var`) in
// lockstep with `rho` (a derivation of the term after it), rebuilding a
// derivation of `s` in which each landing site of the value becomes a
// variable axiom again.  `varmap` tracks binder renamings the forward
// substitution introduced; `active` clears under rebindings of `var`.
struct extraction {
  std::string var;
  term_ptr value;
  std::vector<occurrence> found;

  deriv_ptr walk(const deriv_ptr& rho, const term_ptr& s,
                 const std::map<std::string, std::string>& varmap,
                 bool active) {
    switch (s->kind) {
      case term_kind::variable: {
        if (active && s->name == var) {
          if (!is_positive(*rho->concl.type))
            throw type_error("a function value cannot be bound to a variable");
          found.push_back({rho, rho->concl.type});
          return make_var_axiom(var, rho->concl.type);
        }
        expect(rho->rule == tyrule::var_axiom, "replay expected a variable");
        const std::string& image = mapped(varmap, s->name);
        if (image == s->name) return rho;
        return make_var_axiom(s->name, rho->concl.type);
      }
      case term_kind::sample:
        return rho;
      case term_kind::observe: {
        expect(rho->rule == tyrule::obs_axiom, "replay expected an observation");
        if (active && s->name == var) {
          expect(value->kind == term_kind::variable,
                 "observation subject replaced by a non-variable");
          found.push_back(
              {make_var_axiom(value->name, rho->concl.type), rho->concl.type});
          return make_obs_axiom(var, rho->concl.type);
        }
        if (mapped(varmap, s->name) == s->name) return rho;
        return make_obs_axiom(s->name, rho->concl.type);
      }
      case term_kind::case_of: {
        expect(rho->rule == tyrule::cond_axiom, "replay expected a conditional");
        std::vector<term_ptr> leaves;
        flatten_pair_tree(s->children[0], leaves);
        std::map<std::string, itype_ptr> parents;
        bool renamed = false;
        for (const auto& leaf : leaves) {
          std::string image;
          bool site = active && leaf->name == var;
          if (site) {
            expect(value->kind == term_kind::variable,
                   "conditional scrutinee replaced by a non-variable");
            image = value->name;
          } else {
            image = mapped(varmap, leaf->name);
          }
          auto it = rho->concl.ground_ctx.find(image);
          expect(it != rho->concl.ground_ctx.end(),
                 "conditional parent missing from its axiom");
          if (site) found.push_back({make_var_axiom(image, it->second), it->second});
          if (image != leaf->name) renamed = true;
          parents.emplace(leaf->name, it->second);
        }
        if (!renamed) return rho;
        return make_cond_axiom(s, rho->concl.type, std::move(parents));
      }
      case term_kind::pair_value:
        expect(rho->rule == tyrule::pair_intro, "replay expected a pair");
        return make_pair(walk(rho->premises[0], s->children[0], varmap, active),
                         walk(rho->premises[1], s->children[1], varmap, active),
                         s);
      case term_kind::bang: {
        expect(rho->rule == tyrule::bang_multi, "replay expected a thunk");
        std::vector<deriv_ptr> premises;
        premises.reserve(rho->premises.size());
        for (const auto& p : rho->premises)
          premises.push_back(walk(p, s->children[0], varmap, active));
        return make_bang(std::move(premises), s);
      }
      case term_kind::der:
        expect(rho->rule == tyrule::force, "replay expected a force");
        return make_force(
            walk(rho->premises[0], s->children[0], varmap, active), s);
      case term_kind::abstraction: {
        expect(rho->rule == tyrule::lambda, "replay expected an abstraction");
        auto inner = varmap;
        inner[s->binder] = rho->concl.subject->binder;
        bool below = active && s->binder != var;
        return make_lambda(
            walk(rho->premises[0], s->children[0], inner, below),
            rho->concl.type->parts[0], s);
      }
      case term_kind::application:
        expect(rho->rule == tyrule::apply, "replay expected an application");
        return make_apply(walk(rho->premises[0], s->children[0], varmap, active),
                          walk(rho->premises[1], s->children[1], varmap, active),
                          s);
      case term_kind::let_in: {
        expect(rho->rule == tyrule::let_bind, "replay expected a let");
        auto bound = walk(rho->premises[0], s->children[0], varmap, active);
        auto inner = varmap;
        inner[s->binder] = rho->concl.subject->binder;
        bool below = active && s->binder != var;
        auto body = walk(rho->premises[1], s->children[1], inner, below);
        return make_let(std::move(bound), std::move(body), s);
      }
      case term_kind::letp_in: {
        expect(rho->rule == tyrule::letp_split, "replay expected a pair split");
        auto scrut = walk(rho->premises[0], s->children[0], varmap, active);
        auto inner = varmap;
        inner[s->binder] = rho->concl.subject->binder;
        inner[s->binder2] = rho->concl.subject->binder2;
        bool below = active && s->binder != var && s->binder2 != var;
        auto body = walk(rho->premises[1], s->children[1], inner, below);
        return make_letp(std::move(scrut), std::move(body), s);
      }
      case term_kind::boolean:
        break;
    }
    throw internal_error("boolean under substitution replay");
  }
};

// Ground typing of a value no use site constrains, from the types of the
// variables in scope.
deriv_ptr synth_ground(const term_ptr& v, const env_map& env) {
  switch (v->kind) {
    case term_kind::variable: {
      auto it = env.find(v->name);
      if (it == env.end() || !is_ground(*it->second))
        throw type_error("no ground type for '" + v->name + "'");
      return make_var_axiom(v->name, it->second);
    }
    case term_kind::pair_value:
      return make_pair(synth_ground(v->children[0], env),
                       synth_ground(v->children[1], env), v);
    default:
      throw type_error("pair components must be ground");
  }
}

// Types a value that was substituted but never used: variables keep
// their bound ground type when one is in scope and are consumed as []
// otherwise, thunks are typed with the empty multiset, pairs are typed
// from the environment.
std::pair<deriv_ptr, itype_ptr> synthesize(const term_ptr& v,
                                           const env_map& env) {
  switch (v->kind) {
    case term_kind::variable: {
      auto it = env.find(v->name);
      if (it != env.end() && is_ground(*it->second))
        return {make_var_axiom(v->name, it->second), it->second};
      itype_ptr ty = mk_multiset({});
      return {make_var_axiom(v->name, ty), ty};
    }
    case term_kind::bang: {
      deriv_ptr d = make_bang({}, v);
      return {d, d->concl.type};
    }
    case term_kind::pair_value: {
      deriv_ptr d = synth_ground(v, env);
      return {d, d->concl.type};
    }
    case term_kind::abstraction:
      throw type_error("a function value cannot be bound to a variable");
    default:
      throw internal_error("non-value in substitution replay");
  }
}

// Merges the use sites of a value into the single derivation the binding
// premise needs: ground uses must agree and share one derivation,
// multiset uses concatenate.
std::pair<deriv_ptr, itype_ptr> merge_sites(const std::vector<occurrence>& found,
                                            const term_ptr& value,
                                            const env_map& env) {
  if (found.empty()) return synthesize(value, env);
  switch (value->kind) {
    case term_kind::variable: {
      bool ground = is_ground(*found[0].type);
      for (const auto& occ : found)
        if (is_ground(*occ.type) != ground)
          throw type_error("the variable '" + value->name +
                           "' is used at incompatible types");
      if (ground) {
        for (const auto& occ : found)
          if (!equal_types(*occ.type, *found[0].type))
            throw type_error("the variable '" + value->name +
                             "' is used at incompatible types");
        return {found[0].deriv, found[0].type};
      }
      std::vector<itype_ptr> elems;
      for (const auto& occ : found)
        elems.insert(elems.end(), occ.type->parts.begin(),
                     occ.type->parts.end());
      itype_ptr ty = mk_multiset(std::move(elems));
      return {make_var_axiom(value->name, ty), ty};
    }
    case term_kind::bang: {
      std::vector<deriv_ptr> premises;
      for (const auto& occ : found) {
        expect(occ.deriv->rule == tyrule::bang_multi,
               "thunk use site is not a thunk derivation");
        premises.insert(premises.end(), occ.deriv->premises.begin(),
                        occ.deriv->premises.end());
      }
      deriv_ptr d = make_bang(std::move(premises), value);
      return {d, d->concl.type};
    }
    case term_kind::pair_value: {
      for (const auto& occ : found)
        if (!equal_types(*occ.type, *found[0].type))
          throw type_error("a pair value is used at incompatible types");
      return {found[0].deriv, found[0].type};
    }
    default:
      throw internal_error("unmergeable value in substitution replay");
  }
}

struct anti_result {
  deriv_ptr subject;  // derivation of `s`, the value's sites made variables
  deriv_ptr value;    // derivation of the value at its merged demand
  itype_ptr type;
};

anti_result anti_subst(const deriv_ptr& rho, const std::string& var,
                       const term_ptr& value, const term_ptr& s,
                       const env_map& env) {
  extraction ex{var, value, {}};
  deriv_ptr subject = ex.walk(rho, s, {}, true);
  auto [vd, vt] = merge_sites(ex.found, value, env);
  return {std::move(subject), std::move(vd), std::move(vt)};
}

// One frame of a binding spine: the binders it had in the source term,
// the fresh names contraction gave them, and the derivation of what it
// binds.
struct frame_step {
  bool is_letp;
  std::string orig_binder;
  std::string orig_binder2;
  std::string fresh_binder;
  std::string fresh_binder2;
  deriv_ptr bound;
};

struct spine_core {
  deriv_ptr deriv;
  term_ptr core;
};

// Walks the freshened spine `chain` alongside the derivation of the
// contracted term, recording each frame, extending the environment with
// the frame binders, and returning the derivation of the plugged core.
spine_core descend_frames(const deriv_ptr& d, const term_ptr& chain,
                          const term_ptr& original, env_map& env,
                          std::vector<frame_step>& frames) {
  deriv_ptr cur = d;
  term_ptr fc = chain;
  term_ptr oc = original;
  while (fc->kind == term_kind::let_in || fc->kind == term_kind::letp_in) {
    frame_step f;
    f.is_letp = fc->kind == term_kind::letp_in;
    expect(cur->rule == (f.is_letp ? tyrule::letp_split : tyrule::let_bind),
           "replay derivation misaligned with its spine");
    f.orig_binder = oc->binder;
    f.fresh_binder = fc->binder;
    f.bound = cur->premises[0];
    const itype_ptr& bty = f.bound->concl.type;
    if (f.is_letp) {
      f.orig_binder2 = oc->binder2;
      f.fresh_binder2 = fc->binder2;
      expect(bty->kind == itype_kind::tensor, "pair split over a non-tensor");
      env[fc->binder] = bty->parts[0];
      env[fc->binder2] = bty->parts[1];
    } else {
      env[fc->binder] = bty;
    }
    frames.push_back(std::move(f));
    cur = cur->premises[1];
    fc = fc->children[1];
    oc = oc->children[1];
  }
  return {std::move(cur), std::move(fc)};
}

// Wraps the core derivation back under its frames, innermost first,
// renaming each freshened binder back to its source name just before the
// frame that binds it is reattached.
deriv_ptr rebuild_frames(const std::vector<frame_step>& frames,
                         deriv_ptr core) {
  for (std::size_t j = frames.size(); j-- > 0;) {
    const frame_step& f = frames[j];
    if (f.fresh_binder != f.orig_binder)
      core = rename_free_var(core, f.fresh_binder, f.orig_binder);
    if (f.is_letp && f.fresh_binder2 != f.orig_binder2)
      core = rename_free_var(core, f.fresh_binder2, f.orig_binder2);
    term_ptr subject =
        f.is_letp ? mk_letp(f.orig_binder, f.orig_binder2,
                            f.bound->concl.subject, core->concl.subject)
                  : mk_let(f.orig_binder, f.bound->concl.subject,
                           core->concl.subject);
    core = f.is_letp ? make_letp(f.bound, std::move(core), subject)
                     : make_let(f.bound, std::move(core), subject);
  }
  return core;
}

// let x = <v>S in t  <-  <t{x:=v}>S
deriv_ptr expand_substitute_let(const deriv_ptr& d, const term_ptr& r,
                                env_map env) {
  std::set<std::string> avoid = free_vars(*r->children[1]);
  avoid.erase(r->binder);
  term_ptr chain = freshen_spine(r->children[0], avoid);
  std::vector<frame_step> frames;
  spine_core sc = descend_frames(d, chain, r->children[0], env, frames);
  anti_result a = anti_subst(sc.deriv, r->binder, sc.core, r->children[1], env);
  deriv_ptr bound = rebuild_frames(frames, a.value);
  expect(equal(*bound->concl.subject, *r->children[0]),
         "replay failed to rebuild a bound spine");
  return make_let(std::move(bound), std::move(a.subject), r);
}

// (<\x.t>S) v  <-  <t{x:=v}>S
deriv_ptr expand_beta(const deriv_ptr& d, const term_ptr& r, env_map env) {
  const term_ptr& arg = r->children[1];
  term_ptr chain = freshen_spine(r->children[0], free_vars(*arg));
  std::vector<frame_step> frames;
  spine_core sc = descend_frames(d, chain, r->children[0], env, frames);
  expect(sc.core->kind == term_kind::abstraction,
         "application replay reached a non-abstraction");
  anti_result a =
      anti_subst(sc.deriv, sc.core->binder, arg, sc.core->children[0], env);
  deriv_ptr fun =
      rebuild_frames(frames, make_lambda(std::move(a.subject), a.type, sc.core));
  expect(equal(*fun->concl.subject, *r->children[0]),
         "replay failed to rebuild a function spine");
  return make_apply(std::move(fun), std::move(a.value), r);
}

// der !t  <-  t
deriv_ptr expand_force(const deriv_ptr& d, const term_ptr& r) {
  return make_force(make_bang({d}, r->children[0]), r);
}

// letp <x,y> = <v,w> in t  <-  t{x:=v}{y:=w}
// Contraction renames y when it collides with a free variable of v;
// the same renaming is recomputed here so the two substitutions can be
// undone one at a time.
deriv_ptr expand_split_pair(const deriv_ptr& d, const term_ptr& r,
                            const env_map& env) {
  const term_ptr& scrut = r->children[0];
  const term_ptr& v = scrut->children[0];
  const term_ptr& w = scrut->children[1];
  term_ptr body = r->children[1];
  std::string second = r->binder2;
  if (free_vars(*v).count(second)) {
    std::set<std::string> taken = all_names(*r);
    std::string fresh = fresh_name(second, taken);
    body = substitute(body, second, mk_var(fresh));
    second = fresh;
  }
  term_ptr mid = substitute(body, r->binder, v);
  anti_result aw = anti_subst(d, second, w, mid, env);
  anti_result av = anti_subst(aw.subject, r->binder, v, body, env);
  deriv_ptr body_d = std::move(av.subject);
  if (second != r->binder2)
    body_d = rename_free_var(body_d, second, r->binder2);
  deriv_ptr pair_d = make_pair(std::move(av.value), std::move(aw.value), scrut);
  return make_letp(std::move(pair_d), std::move(body_d), r);
}

// Follows the redex path through the term before the step and the
// derivation of the term after it; the two agree everywhere outside the
// redex.
deriv_ptr expand_at(const deriv_ptr& d, const term_ptr& before,
                    const std::vector<int>& path, std::size_t depth,
                    rewrite_rule rule, env_map& env) {
  if (depth == path.size()) {
    switch (rule) {
      case rewrite_rule::substitute_let:
        return expand_substitute_let(d, before, env);
      case rewrite_rule::beta:
        return expand_beta(d, before, env);
      case rewrite_rule::force_thunk:
        return expand_force(d, before);
      case rewrite_rule::split_pair:
        return expand_split_pair(d, before, env);
    }
    throw internal_error("unhandled rule in replay");
  }
  int idx = path[depth];
  if (before->kind == term_kind::let_in && idx == 0) {
    auto bound =
        expand_at(d->premises[0], before->children[0], path, depth + 1, rule, env);
    return make_let(std::move(bound), d->premises[1], before);
  }
  if (before->kind == term_kind::let_in && idx == 1) {
    env[before->binder] = d->premises[0]->concl.type;
    auto body =
        expand_at(d->premises[1], before->children[1], path, depth + 1, rule, env);
    return make_let(d->premises[0], std::move(body), before);
  }
  if (before->kind == term_kind::application && idx == 0) {
    auto fun =
        expand_at(d->premises[0], before->children[0], path, depth + 1, rule, env);
    return make_apply(std::move(fun), d->premises[1], before);
  }
  throw internal_error("replay path leaves the evaluation context");
}

std::string strip_internal(const char* what) {
  std::string msg = what;
  const std::string prefix = "internal error: ";
  if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
  return msg;
}

}  // namespace

deriv_ptr expand_step(const deriv_ptr& d, const term_ptr& before,
                      const redex& r) {
  env_map env;
  try {
    return expand_at(d, before, r.path, 0, r.rule, env);
  } catch (const internal_error& e) {
    throw type_error("the program is not typable: " +
                     strip_internal(e.what()));
  }
}

infer_result infer_ground(const term_ptr& t, std::uint64_t fuel) {
  reduce_result red = normalize(t, fuel);
  deriv_ptr d = infer_low(red.normal_form);
  for (std::size_t i = red.steps.size(); i-- > 0;) {
    const term_ptr& before = i == 0 ? t : red.steps[i - 1].after;
    d = expand_step(d, before, red.steps[i].contracted);
  }
  return {std::move(d), std::move(red)};
}

}  // namespace hobn
