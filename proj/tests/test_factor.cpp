#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>

#include "hobn/error.hpp"
#include "hobn/factor.hpp"

using namespace hobn;

// Reference lookup: value of f at a full assignment, resolving the
// row-major layout independently of the library's indexing helpers.
static double at(const factor& f, const std::map<std::string, bool>& v) {
  std::size_t idx = 0;
  for (const auto& a : f.scope) {
    bool b = v.at(a.name);
    if (a.observed) {
      if (b != *a.observed) return 0.0;
      continue;
    }
    idx = idx * 2 + (b ? 1 : 0);
  }
  return f.table[idx];
}

static factor random_factor(std::mt19937_64& rng, std::vector<atom> scope) {
  factor f;
  f.scope = std::move(scope);
  std::size_t n = 1;
  for (const auto& a : f.scope)
    if (!a.observed) n *= 2;
  std::uniform_real_distribution<> u(0.1, 1.0);
  for (std::size_t i = 0; i < n; ++i) f.table.push_back(u(rng));
  return f;
}

static void all_assignments(const std::vector<std::string>& names,
                            std::vector<std::map<std::string, bool>>& out) {
  out.clear();
  for (std::size_t bits = 0; bits < (std::size_t(1) << names.size()); ++bits) {
    std::map<std::string, bool> v;
    for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = (bits >> i) & 1;
    out.push_back(std::move(v));
  }
}

TEST_CASE("product agrees with pointwise multiplication") {
  std::mt19937_64 rng(7);
  std::vector<std::string> names = {"A", "B", "C"};
  std::vector<std::map<std::string, bool>> vs;
  all_assignments(names, vs);
  for (int rep = 0; rep < 50; ++rep) {
    factor a = random_factor(rng, {{"A", {}}, {"B", {}}});
    factor b = random_factor(rng, {{"B", {}}, {"C", {}}});
    factor p = product(a, b);
    for (const auto& v : vs)
      CHECK(at(p, v) == doctest::Approx(at(a, v) * at(b, v)).epsilon(1e-12));
  }
}

TEST_CASE("product respects observation slices") {
  std::mt19937_64 rng(8);
  factor a = random_factor(rng, {{"A", {}}, {"B", true}});
  factor b = random_factor(rng, {{"B", true}, {"C", {}}});
  factor p = product(a, b);
  REQUIRE(p.scope.size() == 3);
  CHECK(p.scope[1].name == "B");
  CHECK(p.scope[1].observed == std::optional<bool>(true));
  CHECK(p.table.size() == 4);
  std::map<std::string, bool> v = {{"A", true}, {"B", true}, {"C", false}};
  CHECK(at(p, v) == doctest::Approx(at(a, v) * at(b, v)));
}

TEST_CASE("factors sharing a name must agree on its status") {
  std::mt19937_64 rng(9);
  factor a = random_factor(rng, {{"A", {}}, {"B", true}});
  factor b = random_factor(rng, {{"B", false}, {"C", {}}});
  CHECK_THROWS_AS((void)product(a, b), domain_mismatch);
  factor c = random_factor(rng, {{"B", {}}});
  CHECK_THROWS_AS((void)product(a, c), domain_mismatch);
}

TEST_CASE("summing out marginalizes and only that") {
  std::mt19937_64 rng(10);
  factor f = random_factor(rng, {{"A", {}}, {"B", {}}, {"C", {}}});
  factor m = sum_out(f, {"B"});
  REQUIRE(m.scope.size() == 2);
  std::vector<std::map<std::string, bool>> vs;
  all_assignments({"A", "C"}, vs);
  for (auto v : vs) {
    v["B"] = false;
    double lo = at(f, v);
    v["B"] = true;
    double expect = lo + at(f, v);
    v.erase("B");
    CHECK(at(m, v) == doctest::Approx(expect).epsilon(1e-12));
  }
  // an observed variable sums over its single column
  factor g = random_factor(rng, {{"A", {}}, {"B", true}});
  factor mg = sum_out(g, {"B"});
  CHECK(mg.scope.size() == 1);
  CHECK(mg.table[0] == doctest::Approx(g.table[0]));
  CHECK(mg.table[1] == doctest::Approx(g.table[1]));
}

TEST_CASE("operation counting follows the result sizes") {
  std::mt19937_64 rng(11);
  factor a = random_factor(rng, {{"A", {}}, {"B", {}}});
  factor b = random_factor(rng, {{"B", {}}, {"C", {}}});
  op_counter ops;
  (void)product(a, b, &ops);
  CHECK(ops.multiplications == 8);
  CHECK(ops.additions == 0);
  ops = {};
  (void)sum_out(product(a, b), {"A"}, &ops);
  CHECK(ops.multiplications == 0);
  CHECK(ops.additions == 4);
  // unit-like operands multiply for free
  ops = {};
  (void)product(a, ones({{"C", {}}}), &ops);
  CHECK(ops.multiplications == 0);
  ops = {};
  (void)product(a, unit_factor(), &ops);
  CHECK(ops.multiplications == 0);
  // completion is free by fiat
  ops = {};
  factor comp = completion(a, {{"A", {}}, {"B", {}}, {"D", {}}}, &ops);
  CHECK(ops.multiplications == 0);
  CHECK(comp.scope.size() == 3);
  // summing an observed column costs nothing
  ops = {};
  factor g = random_factor(rng, {{"A", {}}, {"B", true}});
  (void)sum_out(g, {"B"}, &ops);
  CHECK(ops.additions == 0);
}

TEST_CASE("unit recognition") {
  CHECK(is_unit_like(unit_factor()));
  CHECK(is_unit_like(ones({{"A", {}}, {"B", true}})));
  factor f = ones({{"A", {}}});
  f.table[1] = 0.5;
  CHECK_FALSE(is_unit_like(f));
  CHECK(unit_factor().size() == 1);
  CHECK(total(unit_factor()) == doctest::Approx(1.0));
}

TEST_CASE("posterior normalization splits mass from shape") {
  factor f;
  f.scope = {{"A", {}}};
  f.table = {0.1, 0.3};
  auto [post, mass] = normalize_posterior(f);
  CHECK(mass == doctest::Approx(0.4));
  CHECK(post.table[0] == doctest::Approx(0.25));
  CHECK(post.table[1] == doctest::Approx(0.75));
  factor z;
  z.scope = {{"A", {}}};
  z.table = {0.0, 0.0};
  CHECK_THROWS_AS((void)normalize_posterior(z), zero_evidence);
}

TEST_CASE("difference requires matching scopes") {
  factor a;
  a.scope = {{"A", {}}};
  a.table = {0.25, 0.75};
  factor b = a;
  b.table = {0.25, 0.5};
  CHECK(max_abs_diff(a, b) == doctest::Approx(0.25));
  factor c;
  c.scope = {{"B", {}}};
  c.table = {0.25, 0.75};
  CHECK_THROWS_AS((void)max_abs_diff(a, c), domain_mismatch);
}

TEST_CASE("tables print aligned with observed values pinned") {
  factor f;
  f.scope = {{"Rain", {}}, {"Wet", true}};
  f.table = {0.35646, 0.33054};
  std::string text = factor_to_text(f);
  CHECK(text.find("Rain") != std::string::npos);
  CHECK(text.find("Wet=t") != std::string::npos);
  CHECK(text.find("0.35646") != std::string::npos);
  CHECK(text.find("0.33054") != std::string::npos);
  // the false row prints first
  CHECK(text.find("0.35646") < text.find("0.33054"));
}
