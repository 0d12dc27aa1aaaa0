#include "hobn/rewrite.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "hobn/error.hpp"

namespace hobn {

namespace {

term_ptr node(term t) { return std::make_shared<const term>(std::move(t)); }

bool is_frame(const term& t) {
  return t.kind == term_kind::let_in || t.kind == term_kind::letp_in;
}

const term* peel_core(const term_ptr& t) {
  const term* cur = t.get();
  while (is_frame(*cur)) cur = cur->children[1].get();
  return cur;
}

// Substitution leaves observations meaningful only when the replacement
// keeps their subject a variable.
bool no_observed_occurrence(const term& t, const std::string& var) {
  switch (t.kind) {
    case term_kind::variable:
    case term_kind::boolean:
    case term_kind::sample:
      return true;
    case term_kind::observe:
      return t.name != var;
    case term_kind::abstraction:
      return t.binder == var || no_observed_occurrence(*t.children[0], var);
    case term_kind::let_in:
      return no_observed_occurrence(*t.children[0], var) &&
             (t.binder == var || no_observed_occurrence(*t.children[1], var));
    case term_kind::letp_in:
      return no_observed_occurrence(*t.children[0], var) &&
             (t.binder == var || t.binder2 == var ||
              no_observed_occurrence(*t.children[1], var));
    default:
      for (const auto& c : t.children)
        if (!no_observed_occurrence(*c, var)) return false;
      return true;
  }
}

bool substitutable(const term& t, const std::string& var, const term& value) {
  if (value.kind == term_kind::variable) return true;
  return no_observed_occurrence(t, var);
}

bool cpt_over_variables(const term& t) {
  std::vector<term_ptr> leaves;
  flatten_pair_tree(t.children[0], leaves);
  if (static_cast<int>(leaves.size()) != t.case_arity) return false;
  for (const auto& leaf : leaves)
    if (leaf->kind != term_kind::variable) return false;
  return true;
}

std::optional<rewrite_rule> match_root(const term_ptr& t) {
  switch (t->kind) {
    case term_kind::let_in: {
      const term* core = peel_core(t->children[0]);
      if (is_value(*core) &&
          substitutable(*t->children[1], t->binder, *core))
        return rewrite_rule::substitute_let;
      return std::nullopt;
    }
    case term_kind::application: {
      if (!is_value(*t->children[1])) return std::nullopt;
      const term* core = peel_core(t->children[0]);
      if (core->kind == term_kind::abstraction &&
          substitutable(*core->children[0], core->binder, *t->children[1]))
        return rewrite_rule::beta;
      return std::nullopt;
    }
    case term_kind::der:
      if (t->children[0]->kind == term_kind::bang)
        return rewrite_rule::force_thunk;
      return std::nullopt;
    case term_kind::letp_in: {
      const term_ptr& scrut = t->children[0];
      if (scrut->kind != term_kind::pair_value || !is_value(*scrut))
        return std::nullopt;
      if (substitutable(*t->children[1], t->binder, *scrut->children[0]) &&
          substitutable(*t->children[1], t->binder2, *scrut->children[1]))
        return rewrite_rule::split_pair;
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

void scan(const term_ptr& t, std::vector<int>& path, std::vector<redex>& out) {
  if (auto rule = match_root(t)) out.push_back({path, *rule});
  switch (t->kind) {
    case term_kind::let_in:
      path.push_back(0);
      scan(t->children[0], path, out);
      path.back() = 1;
      scan(t->children[1], path, out);
      path.pop_back();
      break;
    case term_kind::application:
      path.push_back(0);
      scan(t->children[0], path, out);
      path.pop_back();
      break;
    default:
      break;
  }
}


term_ptr rebuild_spine(const std::vector<term_ptr>& frames, term_ptr core) {
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    term copy = **it;
    copy.children = {(*it)->children[0], std::move(core)};
    core = node(std::move(copy));
  }
  return core;
}

term_ptr contract_substitute_let(const term_ptr& t) {
  std::set<std::string> avoid = free_vars(*t->children[1]);
  avoid.erase(t->binder);
  term_ptr chain = freshen_spine(t->children[0], avoid);
  std::vector<term_ptr> frames;
  term_ptr core = chain;
  while (is_frame(*core)) {
    frames.push_back(core);
    core = core->children[1];
  }
  term_ptr body = substitute(t->children[1], t->binder, core);
  return rebuild_spine(frames, std::move(body));
}

term_ptr contract_beta(const term_ptr& t) {
  const term_ptr& arg = t->children[1];
  term_ptr chain = freshen_spine(t->children[0], free_vars(*arg));
  std::vector<term_ptr> frames;
  term_ptr core = chain;
  while (is_frame(*core)) {
    frames.push_back(core);
    core = core->children[1];
  }
  term_ptr body = substitute(core->children[0], core->binder, arg);
  return rebuild_spine(frames, std::move(body));
}

term_ptr contract_split_pair(const term_ptr& t) {
  const term_ptr& v = t->children[0]->children[0];
  const term_ptr& w = t->children[0]->children[1];
  term_ptr body = t->children[1];
  std::string second = t->binder2;
  if (free_vars(*v).count(second)) {
    std::set<std::string> taken = all_names(*t);
    std::string fresh = fresh_name(second, taken);
    body = substitute(body, second, mk_var(fresh));
    second = fresh;
  }
  body = substitute(body, t->binder, v);
  return substitute(body, second, w);
}

term_ptr contract_root(const term_ptr& t, rewrite_rule rule) {
  auto matched = match_root(t);
  if (!matched || *matched != rule)
    throw internal_error("redex does not match its rule");
  switch (rule) {
    case rewrite_rule::substitute_let:
      return contract_substitute_let(t);
    case rewrite_rule::beta:
      return contract_beta(t);
    case rewrite_rule::force_thunk:
      return t->children[0]->children[0];
    case rewrite_rule::split_pair:
      return contract_split_pair(t);
  }
  throw internal_error("unhandled rewrite rule");
}

term_ptr apply_at(const term_ptr& t, const std::vector<int>& path,
                  std::size_t depth, rewrite_rule rule) {
  if (depth == path.size()) return contract_root(t, rule);
  int idx = path[depth];
  if (idx < 0 || idx >= static_cast<int>(t->children.size()))
    throw internal_error("redex path leaves the term");
  term copy = *t;
  copy.children[idx] = apply_at(t->children[idx], path, depth + 1, rule);
  return node(std::move(copy));
}

}  // namespace

term_ptr freshen_spine(const term_ptr& m, const std::set<std::string>& avoid) {
  if (!is_frame(*m)) return m;
  term copy = *m;
  term_ptr body = m->children[1];
  std::set<std::string> taken = avoid;
  {
    auto names = all_names(*m);
    taken.insert(names.begin(), names.end());
  }
  auto rename = [&](std::string& binder) {
    if (!avoid.count(binder)) return;
    std::string fresh = fresh_name(binder, taken);
    taken.insert(fresh);
    body = substitute(body, binder, mk_var(fresh));
    binder = fresh;
  };
  rename(copy.binder);
  if (m->kind == term_kind::letp_in) rename(copy.binder2);
  copy.children = {m->children[0], freshen_spine(body, avoid)};
  return node(std::move(copy));
}

std::vector<redex> find_redexes(const term_ptr& t) {
  std::vector<redex> out;
  std::vector<int> path;
  scan(t, path, out);
  return out;
}

term_ptr apply_redex(const term_ptr& t, const redex& r) {
  return apply_at(t, r.path, 0, r.rule);
}

std::optional<step_result> step(const term_ptr& t) {
  auto redexes = find_redexes(t);
  if (redexes.empty()) return std::nullopt;
  return step_result{apply_redex(t, redexes.front()), redexes.front()};
}

reduce_result normalize(const term_ptr& t, std::uint64_t fuel) {
  reduce_result out;
  term_ptr cur = t;
  std::uint64_t taken = 0;
  while (auto s = step(cur)) {
    if (taken == fuel) throw fuel_exhausted(taken);
    cur = s->after;
    out.steps.push_back({s->contracted, cur});
    ++taken;
  }
  out.normal_form = cur;
  return out;
}

namespace {

bool is_statement(const term& t) {
  switch (t.kind) {
    case term_kind::let_in:
      return is_statement(*t.children[0]) && is_statement(*t.children[1]);
    case term_kind::sample:
    case term_kind::observe:
      return true;
    case term_kind::case_of:
      return cpt_over_variables(t);
    default:
      return false;
  }
}

}  // namespace

bool is_bn_normal_form(const term& t) {
  const term* cur = &t;
  while (cur->kind == term_kind::let_in) {
    if (!is_statement(*cur->children[0])) return false;
    cur = cur->children[1].get();
  }
  if (is_value(*cur) && is_low_level(*cur)) return true;
  return is_statement(*cur);
}

namespace {

// Canonical serialization up to alpha equivalence: binders are numbered
// in traversal order, free variables keep their names.
void canon(const term& t, std::map<std::string, std::string>& env,
           std::uint64_t& next, std::string& out) {
  auto bind = [&](const std::string& b) {
    std::string tag = "b" + std::to_string(next++);
    env[b] = tag;
    return tag;
  };
  switch (t.kind) {
    case term_kind::variable: {
      auto it = env.find(t.name);
      out += it == env.end() ? t.name : it->second;
      return;
    }
    case term_kind::boolean:
      out += t.flag ? "#t" : "#f";
      return;
    case term_kind::pair_value:
      out += "<";
      canon(*t.children[0], env, next, out);
      out += ",";
      canon(*t.children[1], env, next, out);
      out += ">";
      return;
    case term_kind::bang:
      out += "!(";
      canon(*t.children[0], env, next, out);
      out += ")";
      return;
    case term_kind::abstraction: {
      auto saved = env;
      out += "\\" + bind(t.binder) + ".(";
      canon(*t.children[0], env, next, out);
      out += ")";
      env = std::move(saved);
      return;
    }
    case term_kind::sample:
      out += "sample[" + t.prob.to_string() + "]";
      return;
    case term_kind::case_of:
      out += "case(";
      canon(*t.children[0], env, next, out);
      out += "){";
      for (const auto& c : t.clauses) out += c.to_string() + ";";
      out += "}";
      return;
    case term_kind::observe: {
      auto it = env.find(t.name);
      out += "obs(" + (it == env.end() ? t.name : it->second) +
             (t.flag ? "=t)" : "=f)");
      return;
    }
    case term_kind::let_in: {
      out += "let ";
      canon(*t.children[0], env, next, out);
      auto saved = env;
      out += " as " + bind(t.binder) + " in (";
      canon(*t.children[1], env, next, out);
      out += ")";
      env = std::move(saved);
      return;
    }
    case term_kind::letp_in: {
      out += "letp ";
      canon(*t.children[0], env, next, out);
      auto saved = env;
      out += " as <" + bind(t.binder) + "," + bind(t.binder2) + "> in (";
      canon(*t.children[1], env, next, out);
      out += ")";
      env = std::move(saved);
      return;
    }
    case term_kind::application:
      out += "(";
      canon(*t.children[0], env, next, out);
      out += " ";
      canon(*t.children[1], env, next, out);
      out += ")";
      return;
    case term_kind::der:
      out += "der(";
      canon(*t.children[0], env, next, out);
      out += ")";
      return;
  }
}

std::string canon(const term& t) {
  std::map<std::string, std::string> env;
  std::uint64_t next = 0;
  std::string out;
  canon(t, env, next, out);
  return out;
}

struct explorer {
  std::uint64_t fuel;
  std::uint64_t used = 0;
  std::map<std::string, std::set<std::uint64_t>> memo;
  std::vector<term_ptr> normal_forms;
  std::set<std::string> normal_keys;

  const std::set<std::uint64_t>& lengths(const term_ptr& t) {
    std::string key = canon(*t);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    auto redexes = find_redexes(t);
    std::set<std::uint64_t> out;
    if (redexes.empty()) {
      out.insert(0);
      if (normal_keys.insert(key).second) normal_forms.push_back(t);
    } else {
      for (const auto& r : redexes) {
        if (++used > fuel) throw fuel_exhausted(static_cast<long long>(fuel));
        for (std::uint64_t l : lengths(apply_redex(t, r))) out.insert(l + 1);
      }
    }
    return memo.emplace(std::move(key), std::move(out)).first->second;
  }
};

}  // namespace

reduction_summary reduction_graph(const term_ptr& t, std::uint64_t fuel) {
  explorer e{fuel};
  auto lengths = e.lengths(t);
  std::sort(e.normal_forms.begin(), e.normal_forms.end(),
            [](const term_ptr& a, const term_ptr& b) {
              return canon(*a) < canon(*b);
            });
  return {std::move(lengths), std::move(e.normal_forms)};
}


const char* rule_name(rewrite_rule r) {
  switch (r) {
    case rewrite_rule::substitute_let:
      return "substitute-let";
    case rewrite_rule::beta:
      return "beta";
    case rewrite_rule::force_thunk:
      return "force";
    case rewrite_rule::split_pair:
      return "split-pair";
  }
  return "?";
}

}  // namespace hobn
