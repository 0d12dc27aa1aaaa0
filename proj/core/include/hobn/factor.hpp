#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hobn/itype.hpp"

namespace hobn {

// Tally of arithmetic work. Passed explicitly so independent pipelines
// never share counts; pass nullptr to skip accounting.
struct op_counter {
  std::uint64_t multiplications = 0;
  std::uint64_t additions = 0;
};

// Table over boolean variables, dense, row major with the first scope
// entry most significant and false before true. An observed variable
// keeps its slot but contributes a single column, the observed value,
// so the physical size is 2^(number of unobserved entries).
struct factor {
  std::vector<atom> scope;  // sorted by name, names distinct
  std::vector<double> table;

  [[nodiscard]] std::size_t width(std::size_t i) const {
    return scope[i].observed ? 1 : 2;
  }
  [[nodiscard]] std::size_t size() const;
};

[[nodiscard]] factor unit_factor();
[[nodiscard]] factor ones(std::vector<atom> scope);

// True for factors whose multiplication is free in the cost model:
// scalars and all-ones tables.
[[nodiscard]] bool is_unit_like(const factor& f);

// Pointwise product over the union scope. Shared names must agree on
// observation status; throws domain_mismatch otherwise. Charges one
// multiplication per result entry unless either operand is unit-like.
[[nodiscard]] factor product(const factor& a, const factor& b,
                             op_counter* ops = nullptr);

// Marginalizes the given names away. Every name must be in scope.
// Charges (k - 1) additions per result entry where k is the number of
// summed assignments.
[[nodiscard]] factor sum_out(const factor& f,
                             const std::set<std::string>& names,
                             op_counter* ops = nullptr);

// Extends f to cover the given scope by multiplying with an all-ones
// factor; free under the accounting exemption.
[[nodiscard]] factor completion(const factor& f, std::vector<atom> target,
                                op_counter* ops = nullptr);

[[nodiscard]] double total(const factor& f);

// Splits an unnormalized result into a distribution and its mass.
// Throws zero_evidence when the mass is zero.
[[nodiscard]] std::pair<factor, double> normalize_posterior(const factor& f);

[[nodiscard]] std::string factor_to_text(const factor& f);

// Largest entrywise difference between factors over the same scope;
// throws domain_mismatch when the scopes differ.
[[nodiscard]] double max_abs_diff(const factor& a, const factor& b);

}  // namespace hobn
