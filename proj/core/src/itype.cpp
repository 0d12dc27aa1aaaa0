#include "hobn/itype.hpp"

namespace hobn {

namespace {

itype_ptr node(itype t) { return std::make_shared<const itype>(std::move(t)); }

}  // namespace

itype_ptr mk_atom(std::string name, std::optional<bool> observed) {
  itype t;
  t.kind = itype_kind::atomic;
  t.at = {std::move(name), observed};
  return node(std::move(t));
}

itype_ptr mk_tensor(itype_ptr l, itype_ptr r) {
  itype t;
  t.kind = itype_kind::tensor;
  t.parts = {std::move(l), std::move(r)};
  return node(std::move(t));
}

itype_ptr mk_multiset(std::vector<itype_ptr> elems) {
  itype t;
  t.kind = itype_kind::multiset;
  t.parts = std::move(elems);
  return node(std::move(t));
}

itype_ptr mk_arrow(itype_ptr from, itype_ptr to) {
  itype t;
  t.kind = itype_kind::arrow;
  t.parts = {std::move(from), std::move(to)};
  return node(std::move(t));
}

bool is_ground(const itype& t) {
  switch (t.kind) {
    case itype_kind::atomic:
      return true;
    case itype_kind::tensor:
      return is_ground(*t.parts[0]) && is_ground(*t.parts[1]);
    default:
      return false;
  }
}

bool is_positive(const itype& t) {
  return t.kind == itype_kind::multiset || is_ground(t);
}

bool equal_types(const itype& a, const itype& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case itype_kind::atomic:
      return a.at == b.at;
    case itype_kind::multiset: {
      if (a.parts.size() != b.parts.size()) return false;
      std::vector<bool> used(b.parts.size(), false);
      for (const auto& ea : a.parts) {
        bool matched = false;
        for (std::size_t j = 0; j < b.parts.size(); ++j) {
          if (used[j] || !equal_types(*ea, *b.parts[j])) continue;
          used[j] = true;
          matched = true;
          break;
        }
        if (!matched) return false;
      }
      return true;
    }
    default:
      if (a.parts.size() != b.parts.size()) return false;
      for (std::size_t i = 0; i < a.parts.size(); ++i)
        if (!equal_types(*a.parts[i], *b.parts[i])) return false;
      return true;
  }
}

void names_into(const itype& t, std::set<std::string>& out) {
  if (t.kind == itype_kind::atomic) out.insert(t.at.name);
  for (const auto& p : t.parts) names_into(*p, out);
}

std::set<std::string> type_names(const itype& t) {
  std::set<std::string> out;
  names_into(t, out);
  return out;
}

void ground_atoms(const itype_ptr& t, std::vector<itype_ptr>& out) {
  if (t->kind == itype_kind::atomic) {
    out.push_back(t);
    return;
  }
  if (t->kind == itype_kind::tensor) {
    ground_atoms(t->parts[0], out);
    ground_atoms(t->parts[1], out);
    return;
  }
}

namespace {

void render(const itype& t, bool parens, std::string& out) {
  switch (t.kind) {
    case itype_kind::atomic:
      out += t.at.name;
      if (t.at.observed) out += t.at.observed.value() ? "^t" : "^f";
      return;
    case itype_kind::tensor:
      if (parens) out += "(";
      render(*t.parts[0], true, out);
      out += " * ";
      render(*t.parts[1], true, out);
      if (parens) out += ")";
      return;
    case itype_kind::multiset:
      out += "[";
      for (std::size_t i = 0; i < t.parts.size(); ++i) {
        if (i) out += ", ";
        render(*t.parts[i], false, out);
      }
      out += "]";
      return;
    case itype_kind::arrow:
      if (parens) out += "(";
      render(*t.parts[0], true, out);
      out += " -o ";
      render(*t.parts[1], false, out);
      if (parens) out += ")";
      return;
  }
}

}  // namespace

std::string type_to_string(const itype& t) {
  std::string out;
  render(t, false, out);
  return out;
}

}  // namespace hobn
