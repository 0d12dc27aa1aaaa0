#include "hobn/flow.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "hobn/error.hpp"
#include "hobn/itype.hpp"

namespace hobn {

namespace {

void expect(bool ok, const char* what) {
  if (!ok) throw internal_error(what);
}

struct node_info {
  deriv_ptr d;
  std::vector<std::size_t> premises;
};

std::size_t collect(const deriv_ptr& d, std::vector<node_info>& out) {
  std::size_t id = out.size();
  out.push_back({d, {}});
  std::vector<std::size_t> kids;
  kids.reserve(d->premises.size());
  for (const auto& p : d->premises) kids.push_back(collect(p, out));
  out[id].premises = std::move(kids);
  return id;
}

void atom_paths(const itype& t, std::vector<int>& prefix,
                std::vector<std::vector<int>>& out) {
  switch (t.kind) {
    case itype_kind::atomic:
      out.push_back(prefix);
      return;
    case itype_kind::tensor:
    case itype_kind::arrow:
    case itype_kind::multiset:
      for (std::size_t i = 0; i < t.parts.size(); ++i) {
        prefix.push_back(static_cast<int>(i));
        atom_paths(*t.parts[i], prefix, out);
        prefix.pop_back();
      }
      return;
  }
}

std::vector<std::vector<int>> atom_paths(const itype& t) {
  std::vector<int> prefix;
  std::vector<std::vector<int>> out;
  atom_paths(t, prefix, out);
  return out;
}

const atom& atom_at(const itype& t, const std::vector<int>& path) {
  const itype* cur = &t;
  for (int s : path) cur = cur->parts.at(s).get();
  expect(cur->kind == itype_kind::atomic, "path misses an atom");
  return cur->at;
}

// Polarity of the occurrence at the given path: inputs face up,
// outputs down, and crossing to the left of an arrow flips.
bool polarity(const itype& root, const std::vector<int>& path, bool input) {
  const itype* cur = &root;
  for (int s : path) {
    if (cur->kind == itype_kind::arrow && s == 0) input = !input;
    cur = cur->parts.at(s).get();
  }
  return input;
}

// Pairs each element of a multiset occurrence with an equal element of
// its counterpart; the typing rules guarantee a perfect matching.
std::vector<std::size_t> match_elements(const std::vector<itype_ptr>& from,
                                        const std::vector<itype_ptr>& to) {
  std::vector<bool> used(to.size(), false);
  std::vector<std::size_t> m;
  for (const auto& f : from) {
    bool found = false;
    for (std::size_t j = 0; j < to.size(); ++j) {
      if (used[j] || !equal_types(*f, *to[j])) continue;
      used[j] = true;
      m.push_back(j);
      found = true;
      break;
    }
    expect(found, "multiset occurrences fail to match");
  }
  return m;
}

struct locator {
  std::size_t node;
  slot_kind slot;
  std::string entry;
  std::size_t elem;
  std::vector<int> path;
};

std::string loc_id(const locator& l) {
  std::string s = "n" + std::to_string(l.node);
  switch (l.slot) {
    case slot_kind::ground_ctx:
      s += ":g:" + l.entry;
      break;
    case slot_kind::multiset_ctx:
      s += ":m:" + l.entry + "#" + std::to_string(l.elem);
      break;
    case slot_kind::subject_type:
      s += ":t";
      break;
  }
  s += ":";
  for (std::size_t i = 0; i < l.path.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(l.path[i]);
  }
  return s;
}

std::vector<int> cat(std::vector<int> prefix, const std::vector<int>& rest) {
  prefix.insert(prefix.end(), rest.begin(), rest.end());
  return prefix;
}

struct builder {
  std::vector<node_info> nodes;
  std::vector<position> positions;
  std::map<std::string, std::size_t> index;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::size_t at(const locator& l) {
    auto it = index.find(loc_id(l));
    expect(it != index.end(), "flow edge misses a position");
    return it->second;
  }

  void add(const locator& from, const locator& to) {
    edges.emplace_back(at(from), at(to));
  }

  // Same occurrence seen from the conclusion (c) and a premise (p):
  // inputs travel up, outputs travel down.
  void corresponding(const locator& c, const locator& p, bool input) {
    if (input)
      add(c, p);
    else
      add(p, c);
  }

  // Two halves of a cut: flow leaves the producing output and enters
  // the consuming input.
  void cut(const locator& out_side, const locator& in_side, bool out_pol) {
    if (!out_pol)
      add(out_side, in_side);
    else
      add(in_side, out_side);
  }

  void build_node(std::size_t id);
  void context_edges(std::size_t id);
  void binder_edges(std::size_t id, std::size_t value_node,
                    const itype_ptr& value_type, std::vector<int> value_prefix,
                    std::size_t body_node, const std::string& binder,
                    bool value_is_conclusion);
};

// Edges between a bound value occurrence (a premise type or the
// conclusion's arrow domain) and the binder's entry in the body
// premise. An absent entry means the binder is unused.
void builder::binder_edges(std::size_t id, std::size_t value_node,
                           const itype_ptr& value_type,
                           std::vector<int> value_prefix,
                           std::size_t body_node, const std::string& binder,
                           bool value_is_conclusion) {
  const judgment& body = nodes[body_node].d->concl;
  const itype& root = *nodes[value_node].d->concl.type;
  if (value_type->kind == itype_kind::multiset) {
    auto entry = body.multiset_ctx.find(binder);
    if (entry == body.multiset_ctx.end()) return;
    auto match = match_elements(value_type->parts, entry->second);
    for (std::size_t i = 0; i < value_type->parts.size(); ++i) {
      for (const auto& p : atom_paths(*value_type->parts[i])) {
        auto vp = cat(value_prefix, cat({static_cast<int>(i)}, p));
        locator value{value_node, slot_kind::subject_type, "", 0, vp};
        locator use{body_node, slot_kind::multiset_ctx, binder, match[i], p};
        bool pol = polarity(root, vp, false);
        if (value_is_conclusion)
          corresponding(value, use, pol);
        else
          cut(value, use, pol);
      }
    }
    return;
  }
  auto entry = body.ground_ctx.find(binder);
  if (entry == body.ground_ctx.end()) return;
  for (const auto& p : atom_paths(*value_type)) {
    auto vp = cat(value_prefix, p);
    locator value{value_node, slot_kind::subject_type, "", 0, vp};
    locator use{body_node, slot_kind::ground_ctx, binder, 0, p};
    bool pol = polarity(root, vp, false);
    if (value_is_conclusion)
      corresponding(value, use, pol);
    else
      cut(value, use, pol);
  }
}

void builder::context_edges(std::size_t id) {
  const node_info& n = nodes[id];
  const judgment& c = n.d->concl;

  // Binders discharged at each premise never correspond to conclusion
  // entries.
  auto discharged = [&](std::size_t premise, const std::string& name) {
    const term& s = *c.subject;
    switch (n.d->rule) {
      case tyrule::let_bind:
        return premise == 1 && name == s.binder;
      case tyrule::letp_split:
        return premise == 1 && (name == s.binder || name == s.binder2);
      case tyrule::lambda:
        return premise == 0 && name == s.binder;
      default:
        return false;
    }
  };

  for (const auto& [name, ty] : c.ground_ctx) {
    for (std::size_t i = 0; i < n.premises.size(); ++i) {
      const judgment& pj = nodes[n.premises[i]].d->concl;
      if (discharged(i, name) || !pj.ground_ctx.count(name)) continue;
      for (const auto& p : atom_paths(*ty)) {
        locator cc{id, slot_kind::ground_ctx, name, 0, p};
        locator pp{n.premises[i], slot_kind::ground_ctx, name, 0, p};
        corresponding(cc, pp, polarity(*ty, p, true));
      }
    }
  }

  // A conclusion multiset entry concatenates premise entries in the
  // order the judgment was assembled: body first for binding rules,
  // left to right everywhere else.
  std::vector<std::size_t> order;
  switch (n.d->rule) {
    case tyrule::let_bind:
    case tyrule::letp_split:
      order = {1, 0};
      break;
    default:
      order.resize(n.premises.size());
      std::iota(order.begin(), order.end(), 0);
      break;
  }
  for (const auto& [name, elems] : c.multiset_ctx) {
    std::size_t k = 0;
    for (std::size_t i : order) {
      const judgment& pj = nodes[n.premises[i]].d->concl;
      if (discharged(i, name)) continue;
      auto it = pj.multiset_ctx.find(name);
      if (it == pj.multiset_ctx.end()) continue;
      for (std::size_t j = 0; j < it->second.size(); ++j, ++k) {
        expect(k < elems.size(), "context concatenation mismatch");
        for (const auto& p : atom_paths(*it->second[j])) {
          locator cc{id, slot_kind::multiset_ctx, name, k, p};
          locator pp{n.premises[i], slot_kind::multiset_ctx, name, j, p};
          corresponding(cc, pp, polarity(*it->second[j], p, true));
        }
      }
    }
    expect(k == elems.size(), "context concatenation mismatch");
  }
}

void builder::build_node(std::size_t id) {
  const node_info& n = nodes[id];
  const judgment& c = n.d->concl;
  auto type_pos = [&](std::size_t node, std::vector<int> path) {
    return locator{node, slot_kind::subject_type, "", 0, std::move(path)};
  };

  if (!n.premises.empty()) context_edges(id);

  switch (n.d->rule) {
    case tyrule::sample_axiom:
      break;
    case tyrule::cond_axiom:
      for (const auto& [name, ty] : c.ground_ctx)
        add({id, slot_kind::ground_ctx, name, 0, {}}, type_pos(id, {}));
      break;
    case tyrule::obs_axiom:
      add({id, slot_kind::ground_ctx, c.subject->name, 0, {}},
          type_pos(id, {}));
      break;
    case tyrule::var_axiom: {
      const std::string& x = c.subject->name;
      if (c.type->kind == itype_kind::multiset) {
        for (std::size_t i = 0; i < c.type->parts.size(); ++i) {
          for (const auto& p : atom_paths(*c.type->parts[i])) {
            locator cc{id, slot_kind::multiset_ctx, x, i, p};
            locator tt = type_pos(id, cat({static_cast<int>(i)}, p));
            // the entry and the subject occurrence have opposite
            // polarity; flow runs input to output
            if (polarity(*c.type->parts[i], p, true))
              add(cc, tt);
            else
              add(tt, cc);
          }
        }
      } else {
        for (const auto& p : atom_paths(*c.type)) {
          locator cc{id, slot_kind::ground_ctx, x, 0, p};
          locator tt = type_pos(id, p);
          if (polarity(*c.type, p, true))
            add(cc, tt);
          else
            add(tt, cc);
        }
      }
      break;
    }
    case tyrule::pair_intro:
      for (int side = 0; side < 2; ++side) {
        const itype& part = *c.type->parts[side];
        for (const auto& p : atom_paths(part))
          corresponding(type_pos(id, cat({side}, p)),
                        type_pos(n.premises[side], p),
                        polarity(*c.type, cat({side}, p), false));
      }
      break;
    case tyrule::letp_split: {
      const itype_ptr& scrut = nodes[n.premises[0]].d->concl.type;
      expect(scrut->kind == itype_kind::tensor, "splitting a non-pair");
      binder_edges(id, n.premises[0], scrut->parts[0], {0}, n.premises[1],
                   c.subject->binder, false);
      binder_edges(id, n.premises[0], scrut->parts[1], {1}, n.premises[1],
                   c.subject->binder2, false);
      for (const auto& p : atom_paths(*c.type))
        corresponding(type_pos(id, p), type_pos(n.premises[1], p),
                      polarity(*c.type, p, false));
      break;
    }
    case tyrule::let_bind: {
      binder_edges(id, n.premises[0], nodes[n.premises[0]].d->concl.type, {},
                   n.premises[1], c.subject->binder, false);
      for (const auto& p : atom_paths(*c.type))
        corresponding(type_pos(id, p), type_pos(n.premises[1], p),
                      polarity(*c.type, p, false));
      break;
    }
    case tyrule::lambda: {
      binder_edges(id, id, c.type->parts[0], {0}, n.premises[0],
                   c.subject->binder, true);
      const itype& codomain = *c.type->parts[1];
      for (const auto& p : atom_paths(codomain))
        corresponding(type_pos(id, cat({1}, p)), type_pos(n.premises[0], p),
                      polarity(*c.type, cat({1}, p), false));
      break;
    }
    case tyrule::apply: {
      const itype_ptr& fun = nodes[n.premises[0]].d->concl.type;
      const itype_ptr& arg = nodes[n.premises[1]].d->concl.type;
      const itype& domain = *fun->parts[0];
      if (domain.kind == itype_kind::multiset) {
        expect(arg->kind == itype_kind::multiset, "argument shape mismatch");
        auto match = match_elements(domain.parts, arg->parts);
        for (std::size_t i = 0; i < domain.parts.size(); ++i) {
          for (const auto& p : atom_paths(*domain.parts[i])) {
            auto fp = cat({0, static_cast<int>(i)}, p);
            auto ap = cat({static_cast<int>(match[i])}, p);
            cut(type_pos(n.premises[1], ap), type_pos(n.premises[0], fp),
                polarity(*arg, ap, false));
          }
        }
      } else {
        for (const auto& p : atom_paths(domain)) {
          cut(type_pos(n.premises[1], p), type_pos(n.premises[0], cat({0}, p)),
              polarity(*arg, p, false));
        }
      }
      for (const auto& p : atom_paths(*c.type))
        corresponding(type_pos(id, p), type_pos(n.premises[0], cat({1}, p)),
                      polarity(*c.type, p, false));
      break;
    }
    case tyrule::bang_multi:
      for (std::size_t i = 0; i < c.type->parts.size(); ++i)
        for (const auto& p : atom_paths(*c.type->parts[i])) {
          auto cp = cat({static_cast<int>(i)}, p);
          corresponding(type_pos(id, cp), type_pos(n.premises[i], p),
                        polarity(*c.type, cp, false));
        }
      break;
    case tyrule::force:
      for (const auto& p : atom_paths(*c.type))
        corresponding(type_pos(id, p), type_pos(n.premises[0], cat({0}, p)),
                      polarity(*c.type, p, false));
      break;
  }
}

}  // namespace

std::string position::id() const {
  return loc_id({node, slot, entry, elem, path});
}

flow_graph build_flow(const deriv_ptr& d) {
  builder b;
  collect(d, b.nodes);

  for (std::size_t id = 0; id < b.nodes.size(); ++id) {
    const judgment& j = b.nodes[id].d->concl;
    bool prob = is_probabilistic_axiom(*b.nodes[id].d);
    auto push = [&](slot_kind slot, const std::string& entry,
                    std::size_t elem, const itype& root, bool base_input) {
      for (const auto& p : atom_paths(root)) {
        position pos;
        pos.node = id;
        pos.slot = slot;
        pos.entry = entry;
        pos.elem = elem;
        pos.path = p;
        pos.input = polarity(root, p, base_input);
        pos.name = atom_at(root, p).name;
        pos.main = prob && slot == slot_kind::subject_type;
        b.positions.push_back(std::move(pos));
      }
    };
    for (const auto& [name, ty] : j.ground_ctx)
      push(slot_kind::ground_ctx, name, 0, *ty, true);
    for (const auto& [name, elems] : j.multiset_ctx)
      for (std::size_t i = 0; i < elems.size(); ++i)
        push(slot_kind::multiset_ctx, name, i, *elems[i], true);
    push(slot_kind::subject_type, "", 0, *j.type, false);
  }

  std::sort(b.positions.begin(), b.positions.end(),
            [](const position& a, const position& c) {
              return std::tie(a.node, a.slot, a.entry, a.elem, a.path) <
                     std::tie(c.node, c.slot, c.entry, c.elem, c.path);
            });
  for (std::size_t i = 0; i < b.positions.size(); ++i)
    b.index[b.positions[i].id()] = i;

  for (std::size_t id = 0; id < b.nodes.size(); ++id) b.build_node(id);

  std::sort(b.edges.begin(), b.edges.end());
  b.edges.erase(std::unique(b.edges.begin(), b.edges.end()), b.edges.end());
  return {std::move(b.positions), std::move(b.edges)};
}

bool is_acyclic(const flow_graph& g) {
  std::vector<std::size_t> indeg(g.positions.size(), 0);
  std::vector<std::vector<std::size_t>> out(g.positions.size());
  for (const auto& [a, b] : g.edges) {
    out[a].push_back(b);
    ++indeg[b];
  }
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < indeg.size(); ++i)
    if (indeg[i] == 0) ready.push_back(i);
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::size_t v = ready.front();
    ready.pop_front();
    ++seen;
    for (std::size_t w : out[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  return seen == g.positions.size();
}

std::map<std::string, std::vector<std::size_t>> named_components(
    const flow_graph& g) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < g.positions.size(); ++i)
    groups[g.positions[i].name].push_back(i);

  std::vector<std::vector<std::size_t>> same_name(g.positions.size());
  for (const auto& [a, b] : g.edges)
    if (g.positions[a].name == g.positions[b].name)
      same_name[a].push_back(b);

  std::map<std::string, std::size_t> mains;
  for (std::size_t i = 0; i < g.positions.size(); ++i) {
    if (!g.positions[i].main) continue;
    auto [it, fresh] = mains.emplace(g.positions[i].name, i);
    if (!fresh)
      throw internal_error("two axioms share the name '" +
                           g.positions[i].name + "'");
  }

  for (const auto& [name, root] : mains) {
    std::set<std::size_t> reached;
    std::deque<std::size_t> todo{root};
    while (!todo.empty()) {
      std::size_t v = todo.front();
      todo.pop_front();
      if (!reached.insert(v).second) continue;
      for (std::size_t w : same_name[v]) todo.push_back(w);
    }
    for (std::size_t i : groups[name])
      if (!reached.count(i))
        throw internal_error("positions of '" + name +
                             "' are not all reachable from the axiom");
  }
  return groups;
}

std::string export_dot(const flow_graph& g) {
  std::ostringstream out;
  out << "digraph flow {\n";
  for (const auto& p : g.positions)
    out << "  \"" << p.id() << "\" [label=\"" << p.name
        << (p.input ? "^" : "v") << "\"];\n";
  for (const auto& [a, b] : g.edges)
    out << "  \"" << g.positions[a].id() << "\" -> \"" << g.positions[b].id()
        << "\";\n";
  out << "}\n";
  return out.str();
}

}  // namespace hobn
