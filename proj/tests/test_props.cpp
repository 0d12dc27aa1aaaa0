#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hobn/bn.hpp"
#include "hobn/check.hpp"
#include "hobn/flow.hpp"
#include "hobn/infer.hpp"
#include "hobn/rewrite.hpp"
#include "hobn/semantics.hpp"
#include "hobn/surface.hpp"

#include "testkit.hpp"

using namespace hobn;

constexpr double kExact = 1e-12;

static void every_node_compatible(const deriv_ptr& d) {
  CHECK(check_compatibility(d->premises));
  for (const auto& p : d->premises) every_node_compatible(p);
}

TEST_CASE("random programs: interpretations and enumeration coincide") {
  std::mt19937_64 rng(20240817);
  for (int i = 0; i < 500; ++i) {
    term_ptr t = testkit::random_first_order(rng);
    CAPTURE(i);
    CAPTURE(pretty(*t));
    infer_result inf = infer_ground(t);
    deriv_ptr d = infer_low(inf.reduction.normal_form);
    factor global = interpret_global(d);
    decorated_node ind = interpret_inductive(d);
    CHECK(max_abs_diff(global, ind.psi) <= kExact);
    CHECK(testkit::oracle_divergence(global, d) <= kExact);
    // the pre-reduction derivation denotes the same factor
    factor original = interpret_global(inf.deriv);
    CHECK(max_abs_diff(global, original) <= kExact);
  }
}

TEST_CASE("random programs: the network's joint recovers the semantics") {
  std::mt19937_64 rng(20240817);  // same stream, same 500 programs
  for (int i = 0; i < 500; ++i) {
    term_ptr t = testkit::random_first_order(rng);
    CAPTURE(i);
    CAPTURE(pretty(*t));
    deriv_ptr d = infer_low(normalize(t).normal_form);
    factor joint = bn_semantics(extract_bn(d));
    std::set<std::string> internal;
    for (const auto& a : joint.scope) internal.insert(a.name);
    for (const std::string& n : judgment_names(d->concl)) internal.erase(n);
    CHECK(max_abs_diff(sum_out(joint, internal), interpret_global(d)) <=
          kExact);
  }
  // and for the fixture programs with sharing and unrolling
  std::vector<std::string> sources = {testkit::src_two_coin};
  for (int n : {1, 2, 3}) sources.push_back(testkit::hmm_src(n));
  for (const std::string& src : sources) {
    deriv_ptr d = infer_low(normalize(parse_program(src)).normal_form);
    factor joint = bn_semantics(extract_bn(d));
    std::set<std::string> internal;
    for (const auto& a : joint.scope) internal.insert(a.name);
    for (const std::string& n : judgment_names(d->concl)) internal.erase(n);
    CHECK(max_abs_diff(sum_out(joint, internal), interpret_global(d)) <=
          kExact);
  }
}

TEST_CASE("random terms: all reduction orders reach one normal form") {
  std::mt19937_64 rng(424242);
  for (int i = 0; i < 200; ++i) {
    term_ptr t = testkit::random_higher_order(rng);
    CAPTURE(i);
    CAPTURE(pretty(*t));
    reduction_summary s = reduction_graph(t);
    CHECK(s.path_lengths.size() == 1);
    REQUIRE(s.normal_forms.size() == 1);
    term_ptr nf = normalize(t).normal_form;
    CHECK(alpha_equal(*s.normal_forms[0], *nf));
    CHECK(is_bn_normal_form(*nf));
  }
}

TEST_CASE("random programs: derivations are well formed throughout") {
  std::mt19937_64 rng(1234321);
  for (int i = 0; i < 100; ++i) {
    term_ptr t = i % 2 == 0 ? testkit::random_first_order(rng)
                            : testkit::random_higher_order(rng);
    CAPTURE(i);
    CAPTURE(pretty(*t));
    infer_result inf = infer_ground(t);
    check_result res = check(inf.deriv);
    CHECK_MESSAGE(res.ok, res.message);
    every_node_compatible(inf.deriv);
    flow_graph g = build_flow(inf.deriv);
    CHECK(is_acyclic(g));
    (void)named_components(g);

    deriv_ptr compiled = infer_low(inf.reduction.normal_form);
    check_result res2 = check(compiled);
    CHECK_MESSAGE(res2.ok, res2.message);
    flow_graph g2 = build_flow(compiled);
    CHECK(is_acyclic(g2));
    (void)named_components(g2);
  }
}

TEST_CASE("random terms: the budget shrinks along every trace") {
  std::mt19937_64 rng(55555);
  for (int i = 0; i < 25; ++i) {
    term_ptr t = testkit::random_higher_order(rng);
    CAPTURE(pretty(*t));
    infer_result inf = infer_ground(t);
    if (inf.reduction.steps.empty()) continue;
    std::vector<term_ptr> states = {t};
    for (const trace_entry& e : inf.reduction.steps) states.push_back(e.after);
    deriv_ptr cur = infer_low(inf.reduction.normal_form);
    std::uint64_t prev = measure(*cur);
    for (std::size_t s = inf.reduction.steps.size(); s-- > 0;) {
      cur = expand_step(cur, states[s], inf.reduction.steps[s].contracted);
      std::uint64_t here = measure(*cur);
      CHECK(prev < here);
      prev = here;
    }
  }
}
