#include "hobn/json_io.hpp"

#include "json.hpp"

namespace hobn {

namespace {

using nlohmann::json;

json term_json(const term& t) {
  switch (t.kind) {
    case term_kind::variable:
      return {{"kind", "var"}, {"name", t.name}};
    case term_kind::boolean:
      return {{"kind", "bool"}, {"value", t.flag}};
    case term_kind::pair_value:
      return {{"kind", "pair"},
              {"left", term_json(*t.children[0])},
              {"right", term_json(*t.children[1])}};
    case term_kind::bang:
      return {{"kind", "bang"}, {"body", term_json(*t.children[0])}};
    case term_kind::abstraction:
      return {{"kind", "lambda"},
              {"binder", t.binder},
              {"body", term_json(*t.children[0])}};
    case term_kind::sample:
      return {{"kind", "sample"}, {"prob", t.prob.to_string()}};
    case term_kind::case_of: {
      json clauses = json::array();
      for (const auto& c : t.clauses) clauses.push_back(c.to_string());
      return {{"kind", "case"},
              {"scrutinee", term_json(*t.children[0])},
              {"arity", t.case_arity},
              {"clauses", clauses}};
    }
    case term_kind::observe:
      return {{"kind", "observe"}, {"var", t.name}, {"value", t.flag}};
    case term_kind::let_in:
      return {{"kind", "let"},
              {"binder", t.binder},
              {"bound", term_json(*t.children[0])},
              {"body", term_json(*t.children[1])}};
    case term_kind::letp_in:
      return {{"kind", "letp"},
              {"binders", json::array({t.binder, t.binder2})},
              {"scrutinee", term_json(*t.children[0])},
              {"body", term_json(*t.children[1])}};
    case term_kind::application:
      return {{"kind", "apply"},
              {"function", term_json(*t.children[0])},
              {"argument", term_json(*t.children[1])}};
    case term_kind::der:
      return {{"kind", "der"}, {"body", term_json(*t.children[0])}};
  }
  return nullptr;
}

json type_json(const itype& t) {
  switch (t.kind) {
    case itype_kind::atomic: {
      json a = {{"kind", "atom"}, {"name", t.at.name}};
      a["observed"] = t.at.observed ? json(*t.at.observed) : json(nullptr);
      return a;
    }
    case itype_kind::tensor:
      return {{"kind", "tensor"},
              {"left", type_json(*t.parts[0])},
              {"right", type_json(*t.parts[1])}};
    case itype_kind::multiset: {
      json elems = json::array();
      for (const auto& e : t.parts) elems.push_back(type_json(*e));
      return {{"kind", "multiset"}, {"elements", elems}};
    }
    case itype_kind::arrow:
      return {{"kind", "arrow"},
              {"domain", type_json(*t.parts[0])},
              {"codomain", type_json(*t.parts[1])}};
  }
  return nullptr;
}

json judgment_json(const judgment& j) {
  json ground = json::object();
  for (const auto& [var, ty] : j.ground_ctx) ground[var] = type_json(*ty);
  json multi = json::object();
  for (const auto& [var, elems] : j.multiset_ctx) {
    json list = json::array();
    for (const auto& e : elems) list.push_back(type_json(*e));
    multi[var] = list;
  }
  return {{"ground_ctx", ground},
          {"multiset_ctx", multi},
          {"subject", pretty(*j.subject)},
          {"type", type_json(*j.type)}};
}

json deriv_json(const derivation& d) {
  json premises = json::array();
  for (const auto& p : d.premises) premises.push_back(deriv_json(*p));
  return {{"rule", rule_label(d.rule)},
          {"judgment", judgment_json(d.concl)},
          {"premises", premises}};
}

json factor_json(const factor& f) {
  json scope = json::array();
  for (const auto& a : f.scope) {
    json entry = {{"name", a.name}};
    entry["observed"] = a.observed ? json(*a.observed) : json(nullptr);
    scope.push_back(entry);
  }
  return {{"scope", scope}, {"table", f.table}};
}

json bn_json(const bayesian_network& b) {
  json nodes = json::array();
  for (const auto& n : b.nodes)
    nodes.push_back({{"name", n.name},
                     {"parents", n.parents},
                     {"cpt", factor_json(n.cpt)}});
  json out = {{"nodes", nodes}, {"query", b.query}};
  if (b.warning) out["warning"] = *b.warning;
  return out;
}

json cost_json(const cost_report& r) {
  return {{"multiplications", r.multiplications},
          {"additions", r.additions},
          {"prob_axioms", r.prob_axioms},
          {"axiom_names", r.axiom_names},
          {"max_width", r.max_width},
          {"bound_global", r.bound_global},
          {"bound_inductive", r.bound_inductive}};
}

}  // namespace

std::string to_json(const term& t) { return term_json(t).dump(2); }

std::string to_json(const itype& t) { return type_json(t).dump(2); }

std::string to_json(const derivation& d) { return deriv_json(d).dump(2); }

std::string to_json(const factor& f) { return factor_json(f).dump(2); }

std::string to_json(const bayesian_network& b) { return bn_json(b).dump(2); }

std::string to_json(const flow_graph& g) {
  json positions = json::array();
  for (const auto& p : g.positions)
    positions.push_back({{"id", p.id()},
                         {"name", p.name},
                         {"polarity", p.input ? "up" : "down"},
                         {"main", p.main}});
  json edges = json::array();
  for (const auto& [a, b] : g.edges)
    edges.push_back(
        json::array({g.positions[a].id(), g.positions[b].id()}));
  return json{{"positions", positions}, {"edges", edges}}.dump(2);
}

std::string to_json(const cost_report& r) { return cost_json(r).dump(2); }

std::string to_json(const query_result& r) {
  return json{{"marginal", factor_json(r.marginal)},
              {"posterior", factor_json(r.posterior)},
              {"evidence", r.evidence},
              {"cost", cost_json(r.cost)},
              {"bn", bn_json(r.bn)}}
      .dump(2);
}

}  // namespace hobn
