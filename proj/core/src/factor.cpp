#include "hobn/factor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hobn/error.hpp"

namespace hobn {

namespace {

void expect(bool ok, const char* what) {
  if (!ok) throw internal_error(what);
}

void validate(const factor& f) {
  for (std::size_t i = 0; i + 1 < f.scope.size(); ++i)
    expect(f.scope[i].name < f.scope[i + 1].name, "factor scope out of order");
}

// Decodes a linear index into one digit per scope entry; observed
// entries always read their pinned value.
std::vector<bool> decode(const factor& f, std::size_t idx) {
  std::vector<bool> vals(f.scope.size());
  for (std::size_t i = f.scope.size(); i-- > 0;) {
    if (f.scope[i].observed) {
      vals[i] = *f.scope[i].observed;
    } else {
      vals[i] = idx & 1;
      idx >>= 1;
    }
  }
  return vals;
}

std::size_t encode(const factor& f, const std::vector<bool>& vals) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < f.scope.size(); ++i) {
    if (f.scope[i].observed) continue;
    idx = idx * 2 + (vals[i] ? 1 : 0);
  }
  return idx;
}

std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::size_t factor::size() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < scope.size(); ++i) n *= width(i);
  return n;
}

factor unit_factor() { return factor{{}, {1.0}}; }

factor ones(std::vector<atom> scope) {
  std::sort(scope.begin(), scope.end(),
            [](const atom& a, const atom& b) { return a.name < b.name; });
  for (std::size_t i = 0; i + 1 < scope.size(); ++i)
    expect(scope[i].name != scope[i + 1].name, "duplicate name in scope");
  factor f{std::move(scope), {}};
  f.table.assign(f.size(), 1.0);
  return f;
}

bool is_unit_like(const factor& f) {
  if (f.scope.empty()) return true;
  return std::all_of(f.table.begin(), f.table.end(),
                     [](double v) { return v == 1.0; });
}

factor product(const factor& a, const factor& b, op_counter* ops) {
  validate(a);
  validate(b);
  std::vector<atom> scope;
  auto ia = a.scope.begin();
  auto ib = b.scope.begin();
  while (ia != a.scope.end() || ib != b.scope.end()) {
    if (ib == b.scope.end() ||
        (ia != a.scope.end() && ia->name < ib->name)) {
      scope.push_back(*ia++);
    } else if (ia == a.scope.end() || ib->name < ia->name) {
      scope.push_back(*ib++);
    } else {
      if (ia->observed != ib->observed)
        throw domain_mismatch("observation status disagrees for '" +
                              ia->name + "'");
      scope.push_back(*ia++);
      ++ib;
    }
  }
  factor out{std::move(scope), {}};
  out.table.assign(out.size(), 0.0);

  // Positions of each operand's entries within the merged scope.
  std::vector<std::size_t> pos_a, pos_b;
  for (std::size_t i = 0, j = 0, k = 0; i < out.scope.size(); ++i) {
    if (j < a.scope.size() && a.scope[j].name == out.scope[i].name) {
      pos_a.push_back(i);
      ++j;
    }
    if (k < b.scope.size() && b.scope[k].name == out.scope[i].name) {
      pos_b.push_back(i);
      ++k;
    }
  }

  std::vector<bool> va(a.scope.size()), vb(b.scope.size());
  for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
    auto vals = decode(out, idx);
    for (std::size_t j = 0; j < pos_a.size(); ++j) va[j] = vals[pos_a[j]];
    for (std::size_t k = 0; k < pos_b.size(); ++k) vb[k] = vals[pos_b[k]];
    out.table[idx] = a.table[encode(a, va)] * b.table[encode(b, vb)];
  }
  if (ops && !is_unit_like(a) && !is_unit_like(b))
    ops->multiplications += out.table.size();
  return out;
}

factor sum_out(const factor& f, const std::set<std::string>& names,
               op_counter* ops) {
  if (names.empty()) return f;
  validate(f);
  std::size_t removed = 1;
  for (const auto& n : names) {
    auto it = std::find_if(f.scope.begin(), f.scope.end(),
                           [&](const atom& a) { return a.name == n; });
    if (it == f.scope.end())
      throw domain_mismatch("cannot sum out '" + n + "': not in scope");
    removed *= it->observed ? 1 : 2;
  }
  factor out;
  for (const auto& a : f.scope)
    if (!names.count(a.name)) out.scope.push_back(a);
  out.table.assign(out.size(), 0.0);

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < f.scope.size(); ++i)
    if (!names.count(f.scope[i].name)) keep.push_back(i);

  std::vector<bool> vk(keep.size());
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    auto vals = decode(f, idx);
    for (std::size_t i = 0; i < keep.size(); ++i) vk[i] = vals[keep[i]];
    out.table[encode(out, vk)] += f.table[idx];
  }
  if (ops) ops->additions += (removed - 1) * out.table.size();
  return out;
}

factor completion(const factor& f, std::vector<atom> target,
                  op_counter* ops) {
  return product(f, ones(std::move(target)), ops);
}

double total(const factor& f) {
  double mass = 0;
  for (double v : f.table) mass += v;
  return mass;
}

std::pair<factor, double> normalize_posterior(const factor& f) {
  double mass = total(f);
  if (mass == 0.0) throw zero_evidence();
  factor out = f;
  for (double& v : out.table) v /= mass;
  return {std::move(out), mass};
}

double max_abs_diff(const factor& a, const factor& b) {
  bool same = a.scope.size() == b.scope.size();
  for (std::size_t i = 0; same && i < a.scope.size(); ++i)
    same = a.scope[i].name == b.scope[i].name &&
           a.scope[i].observed == b.scope[i].observed;
  if (!same || a.table.size() != b.table.size())
    throw domain_mismatch("comparing factors over different scopes");
  double worst = 0;
  for (std::size_t i = 0; i < a.table.size(); ++i)
    worst = std::max(worst, std::abs(a.table[i] - b.table[i]));
  return worst;
}

std::string factor_to_text(const factor& f) {
  if (f.scope.empty()) return show(f.table.at(0)) + "\n";
  std::vector<std::string> headers;
  for (const auto& a : f.scope)
    headers.push_back(a.observed ? a.name + "=" + (*a.observed ? "t" : "f")
                                 : a.name);
  std::ostringstream out;
  for (std::size_t i = 0; i < headers.size(); ++i)
    out << (i ? " " : "") << headers[i];
  out << " | value\n";
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    auto vals = decode(f, idx);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      std::string cell(vals[i] ? "t" : "f");
      cell.resize(std::max(cell.size(), headers[i].size()), ' ');
      out << (i ? " " : "") << cell;
    }
    out << " | " << show(f.table[idx]) << "\n";
  }
  return out.str();
}

}  // namespace hobn
