#include "hobn/infer.hpp"

#include <cctype>
#include <functional>

#include "hobn/error.hpp"

namespace hobn {

namespace {

struct low_inferrer {
  std::map<std::string, itype_ptr> env;
  std::set<std::string> taken;
  std::map<std::string, bool> observed;
  int unnamed = 0;

  std::string mint(const std::string& hint) {
    std::string candidate;
    if (!hint.empty() && hint[0] != '_') {
      candidate = hint;
      candidate[0] = static_cast<char>(
          std::toupper(static_cast<unsigned char>(candidate[0])));
      while (taken.count(candidate)) candidate += "'";
    } else {
      do {
        candidate = "X" + std::to_string(unnamed++);
      } while (taken.count(candidate));
    }
    taken.insert(candidate);
    return candidate;
  }

  const itype_ptr& lookup(const std::string& var) {
    auto it = env.find(var);
    if (it == env.end())
      throw type_error("variable '" + var + "' is not in scope");
    return it->second;
  }

  void record_observation(const std::string& name, bool value) {
    auto [it, inserted] = observed.emplace(name, value);
    if (!inserted && it->second != value)
      throw type_error("contradictory observations of " + name);
  }

  deriv_ptr infer(const term_ptr& t, const std::string& hint) {
    switch (t->kind) {
      case term_kind::variable:
        return make_var_axiom(t->name, lookup(t->name));
      case term_kind::boolean:
        throw type_error("boolean constants are not typable");
      case term_kind::sample:
        return make_sample_axiom(t, mk_atom(mint(hint)));
      case term_kind::observe: {
        const itype_ptr& ty = lookup(t->name);
        if (ty->kind != itype_kind::atomic)
          throw type_error("observed variable '" + t->name +
                           "' must have an atomic type, has " +
                           type_to_string(*ty));
        record_observation(ty->at.name, t->flag);
        derivation d;
        d.rule = tyrule::obs_axiom;
        d.concl.subject = t;
        d.concl.ground_ctx[t->name] = ty;
        d.concl.type = ty;
        return std::make_shared<const derivation>(std::move(d));
      }
      case term_kind::case_of: {
        std::vector<term_ptr> leaves;
        flatten_pair_tree(t->children[0], leaves);
        if (static_cast<int>(leaves.size()) != t->case_arity)
          throw type_error("conditional over " +
                           std::to_string(leaves.size()) +
                           " variables but its table has arity " +
                           std::to_string(t->case_arity));
        std::map<std::string, itype_ptr> parents;
        for (const auto& leaf : leaves) {
          if (leaf->kind != term_kind::variable)
            throw type_error("conditional scrutinee must be variables");
          const itype_ptr& ty = lookup(leaf->name);
          if (ty->kind != itype_kind::atomic)
            throw type_error("conditional parent '" + leaf->name +
                             "' must have an atomic type, has " +
                             type_to_string(*ty));
          auto it = parents.find(leaf->name);
          if (it == parents.end()) parents.emplace(leaf->name, ty);
        }
        return make_cond_axiom(t, mk_atom(mint(hint)), std::move(parents));
      }
      case term_kind::pair_value: {
        deriv_ptr l = infer(t->children[0], "");
        deriv_ptr r = infer(t->children[1], "");
        if (!is_ground(*l->concl.type) || !is_ground(*r->concl.type))
          throw type_error("pair components must have ground types");
        return make_pair(std::move(l), std::move(r), t);
      }
      case term_kind::let_in: {
        deriv_ptr bound = infer(t->children[0], t->binder);
        auto saved = env.extract(t->binder);
        env[t->binder] = bound->concl.type;
        deriv_ptr body = infer(t->children[1], hint);
        env.erase(t->binder);
        if (!saved.empty()) env.insert(std::move(saved));
        return make_let(std::move(bound), std::move(body), t);
      }
      case term_kind::letp_in: {
        deriv_ptr scrut = infer(t->children[0], "");
        if (scrut->concl.type->kind != itype_kind::tensor)
          throw type_error("splitting a value of non-pair type " +
                           type_to_string(*scrut->concl.type));
        auto saved1 = env.extract(t->binder);
        auto saved2 = env.extract(t->binder2);
        env[t->binder] = scrut->concl.type->parts[0];
        env[t->binder2] = scrut->concl.type->parts[1];
        deriv_ptr body = infer(t->children[1], hint);
        env.erase(t->binder);
        env.erase(t->binder2);
        if (!saved1.empty()) env.insert(std::move(saved1));
        if (!saved2.empty()) env.insert(std::move(saved2));
        return make_letp(std::move(scrut), std::move(body), t);
      }
      default:
        throw type_error(
            "first-order inference reached a higher-order construct; "
            "the term is not in normal form");
    }
  }
};

}  // namespace

deriv_ptr infer_low(const term_ptr& t,
                    const std::map<std::string, itype_ptr>& ctx) {
  low_inferrer inf;
  inf.env = ctx;
  std::map<std::string, bool> pinned;
  for (const auto& [var, ty] : ctx) {
    names_into(*ty, inf.taken);
    std::vector<itype_ptr> atoms;
    ground_atoms(ty, atoms);
    for (const auto& a : atoms)
      if (a->at.observed) pinned[a->at.name] = a->at.observed.value();
  }
  for (const auto& [name, value] : pinned) inf.observed.emplace(name, value);
  deriv_ptr plain = inf.infer(t, "");
  return set_observed(plain, inf.observed);
}

deriv_ptr generalize(const deriv_ptr& d) {
  std::map<std::string, bool> forced;
  std::function<void(const derivation&)> walk = [&](const derivation& n) {
    if (n.rule == tyrule::obs_axiom)
      forced[n.concl.type->at.name] = n.concl.type->at.observed.value();
    for (const auto& p : n.premises) walk(*p);
  };
  walk(*d);
  return set_observed(d, forced);
}

}  // namespace hobn
