#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hobn {

// A named boolean atom; `observed` narrows its domain to one value.
struct atom {
  std::string name;
  std::optional<bool> observed;

  friend bool operator==(const atom& a, const atom& b) {
    return a.name == b.name && a.observed == b.observed;
  }
};

enum class itype_kind { atomic, tensor, multiset, arrow };

struct itype;
using itype_ptr = std::shared_ptr<const itype>;

// Ground types: atoms and tensors of ground types.
// Positive types: ground types and multisets.
// Types: positive types and arrows from a positive type.
// Multisets compare up to permutation; their stored order tracks the
// premise order of the introducing node.
struct itype {
  itype_kind kind;
  atom at;                       // atomic
  std::vector<itype_ptr> parts;  // tensor [l,r]; multiset elements; arrow [P,A]
};

[[nodiscard]] itype_ptr mk_atom(std::string name,
                                std::optional<bool> observed = std::nullopt);
[[nodiscard]] itype_ptr mk_tensor(itype_ptr l, itype_ptr r);
[[nodiscard]] itype_ptr mk_multiset(std::vector<itype_ptr> elems);
[[nodiscard]] itype_ptr mk_arrow(itype_ptr from, itype_ptr to);

[[nodiscard]] bool is_ground(const itype& t);
[[nodiscard]] bool is_positive(const itype& t);

// Structural equality, multisets up to permutation.
[[nodiscard]] bool equal_types(const itype& a, const itype& b);

void names_into(const itype& t, std::set<std::string>& out);
[[nodiscard]] std::set<std::string> type_names(const itype& t);

// Leaf atoms of a ground type, left to right.
void ground_atoms(const itype_ptr& t, std::vector<itype_ptr>& out);

[[nodiscard]] std::string type_to_string(const itype& t);

}  // namespace hobn
