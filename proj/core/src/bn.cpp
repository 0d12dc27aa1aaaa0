#include "hobn/bn.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "hobn/check.hpp"
#include "hobn/error.hpp"
#include "hobn/flow.hpp"
#include "hobn/semantics.hpp"

namespace hobn {

namespace {

void type_names_in_order(const itype& t, std::vector<std::string>& out) {
  if (t.kind == itype_kind::atomic) {
    out.push_back(t.at.name);
    return;
  }
  for (const auto& p : t.parts) type_names_in_order(*p, out);
}

void expect_dag(const bayesian_network& b) {
  std::map<std::string, std::size_t> indeg;
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& n : b.nodes) indeg[n.name];
  for (const auto& [from, to] : b.edges) {
    indeg[from];
    out[from].push_back(to);
    ++indeg[to];
  }
  std::deque<std::string> ready;
  for (const auto& [name, deg] : indeg)
    if (deg == 0) ready.push_back(name);
  std::size_t seen = 0;
  while (!ready.empty()) {
    auto v = ready.front();
    ready.pop_front();
    ++seen;
    for (const auto& w : out[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  if (seen != indeg.size())
    throw internal_error("extracted network has a cycle");
}

}  // namespace

bayesian_network extract_bn(const deriv_ptr& d, bn_edge_source mode) {
  auto valid = check(d);
  if (!valid.ok) throw type_error(valid.message, valid.path);
  if (!is_ground(*d->concl.type))
    throw type_error("network extraction needs a ground result, got " +
                     type_to_string(*d->concl.type));

  bayesian_network b;
  if (!d->concl.ground_ctx.empty() || !d->concl.multiset_ctx.empty())
    b.warning = "open program: the result is a conditional network";

  std::vector<deriv_ptr> axioms;
  collect_axioms(d, axioms);
  for (const auto& a : axioms) {
    bn_node n;
    n.name = main_name(*a);
    std::set<std::string> parents;
    for (const auto& [var, ty] : a->concl.ground_ctx)
      parents.insert(ty->at.name);
    n.parents.assign(parents.begin(), parents.end());
    n.cpt = axiom_factor(*a);
    b.nodes.push_back(std::move(n));
  }
  std::sort(b.nodes.begin(), b.nodes.end(),
            [](const bn_node& x, const bn_node& y) { return x.name < y.name; });

  switch (mode) {
    case bn_edge_source::axiom_parents:
      for (const auto& n : b.nodes)
        for (const auto& p : n.parents) b.edges.emplace_back(p, n.name);
      break;
    case bn_edge_source::flow_collapse: {
      auto g = build_flow(d);
      for (const auto& [x, y] : g.edges) {
        const auto& from = g.positions[x].name;
        const auto& to = g.positions[y].name;
        if (from != to) b.edges.emplace_back(from, to);
      }
      break;
    }
  }
  std::sort(b.edges.begin(), b.edges.end());
  b.edges.erase(std::unique(b.edges.begin(), b.edges.end()), b.edges.end());
  expect_dag(b);

  type_names_in_order(*d->concl.type, b.query);
  return b;
}

factor bn_semantics(const bayesian_network& b) {
  factor acc = unit_factor();
  for (const auto& n : b.nodes) acc = product(acc, n.cpt);
  return acc;
}

std::string export_dot(const bayesian_network& b) {
  std::ostringstream out;
  out << "digraph bn {\n";
  for (const auto& n : b.nodes) {
    std::string label = n.name;
    for (const auto& a : n.cpt.scope)
      if (a.name == n.name && a.observed)
        label += *a.observed ? " = t (observed)" : " = f (observed)";
    out << "  \"" << n.name << "\" [label=\"" << label << "\"];\n";
  }
  for (const auto& [from, to] : b.edges)
    out << "  \"" << from << "\" -> \"" << to << "\";\n";
  out << "}\n";
  return out.str();
}

}  // namespace hobn
