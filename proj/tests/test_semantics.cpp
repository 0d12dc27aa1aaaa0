#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hobn/error.hpp"
#include "hobn/infer.hpp"
#include "hobn/semantics.hpp"
#include "hobn/surface.hpp"

#include "testkit.hpp"

using namespace hobn;

constexpr double kExact = 1e-12;

static bool close(double a, double b, double tol = kExact) {
  return std::fabs(a - b) <= tol;
}

TEST_CASE("enumeration stands on its own feet") {
  // hand-computed lawn numbers, derived once with pencil and paper
  term_ptr t = parse_program(testkit::src_sprinkler_posterior);
  deriv_ptr d = infer_low(normalize(t).normal_form);
  testkit::oracle_marginal m = testkit::enumerate_marginal(d);
  REQUIRE(m.names.size() == 2);  // rain and the observed wetness
  double seen_t = -1, seen_f = -1;
  for (const auto& [key, mass] : m.mass) {
    if (key[0])
      seen_t = mass;
    else
      seen_f = mass;
  }
  CHECK(close(seen_t, 0.33054));
  CHECK(close(seen_f, 0.35646));
}

TEST_CASE("the two interpretations and the enumeration agree") {
  for (const char* src :
       {testkit::src_sprinkler, testkit::src_sprinkler_posterior,
        testkit::src_rain_wet, testkit::src_coin_learning,
        testkit::src_two_coin, testkit::src_chain_direct,
        testkit::src_chain_nested, testkit::src_shared_sample,
        testkit::src_fork_alias}) {
    term_ptr t = parse_program(src);
    deriv_ptr d = infer_low(normalize(t).normal_form);
    factor global = interpret_global(d);
    decorated_node inductive = interpret_inductive(d);
    CHECK(max_abs_diff(global, inductive.psi) <= kExact);
    CHECK(testkit::oracle_divergence(global, d) <= kExact);
  }
}

TEST_CASE("lawn queries against frozen numbers") {
  query_result q = posterior_query(parse_program(testkit::src_sprinkler));
  CHECK(close(q.marginal.table[1], 0.687, 1e-9));
  CHECK(close(q.evidence, 1.0));

  query_result p =
      posterior_query(parse_program(testkit::src_sprinkler_posterior));
  CHECK(close(p.marginal.table[1], 0.33054));
  CHECK(close(p.marginal.table[0], 0.35646));
  CHECK(close(p.evidence, 0.687));
  CHECK(close(p.posterior.table[1], 0.33054 / 0.687, 1e-9));
}

TEST_CASE("rain and wet grass against frozen numbers") {
  query_result q = posterior_query(parse_program(testkit::src_rain_wet));
  CHECK(close(q.marginal.table[1], 0.14));
  CHECK(close(q.marginal.table[0], 0.008));
  CHECK(close(q.evidence, 0.148));
  CHECK(close(q.posterior.table[1], 0.14 / 0.148, 1e-9));
  CHECK(close(q.posterior.table[0], 0.008 / 0.148, 1e-9));
}

TEST_CASE("coin bias learning against frozen numbers") {
  query_result q = posterior_query(parse_program(testkit::src_coin_learning));
  CHECK(close(q.marginal.table[1], 0.245));
  CHECK(close(q.marginal.table[0], 0.08));
  CHECK(close(q.evidence, 0.325));
  CHECK(close(q.posterior.table[1], 0.245 / 0.325, 1e-9));
}

TEST_CASE("a shared coin splits into two independent tosses") {
  query_result q = posterior_query(parse_program(testkit::src_two_coin));
  REQUIRE(q.marginal.scope.size() == 3);
  REQUIRE(q.marginal.table.size() == 8);
  // scope sorted with the bias first; rows indexed bias, toss1, toss2
  double expect[8] = {0.18, 0.12, 0.12, 0.08, 0.045, 0.105, 0.105, 0.245};
  for (int i = 0; i < 8; ++i) CHECK(close(q.marginal.table[i], expect[i]));
  CHECK(close(q.evidence, 1.0));
}

TEST_CASE("binding order changes the work, not the answer") {
  query_result direct = posterior_query(parse_program(testkit::src_chain_direct));
  query_result nested = posterior_query(parse_program(testkit::src_chain_nested));
  CHECK(max_abs_diff(direct.marginal, nested.marginal) <= kExact);
  CHECK(close(direct.marginal.table[1], 0.3075));

  CHECK(direct.cost.multiplications == 12);
  CHECK(direct.cost.additions == 6);
  CHECK(nested.cost.multiplications == 8);
  CHECK(nested.cost.additions == 4);
  CHECK(direct.cost.prob_axioms == 3);
  CHECK(nested.cost.prob_axioms == 3);
  CHECK(direct.cost.max_width == 3);
  CHECK(nested.cost.max_width == 2);
  CHECK(direct.cost.bound_inductive == 24);
  CHECK(nested.cost.bound_inductive == 12);
  CHECK(direct.cost.multiplications + direct.cost.additions <=
        direct.cost.bound_global + direct.cost.bound_inductive);
}

TEST_CASE("cost bounds hold across the fixtures") {
  for (const char* src :
       {testkit::src_sprinkler, testkit::src_sprinkler_posterior,
        testkit::src_rain_wet, testkit::src_coin_learning,
        testkit::src_two_coin, testkit::src_chain_direct,
        testkit::src_chain_nested}) {
    deriv_ptr d = infer_low(normalize(parse_program(src)).normal_form);
    cost_report c = cost(d);
    CHECK(c.prob_axioms <= c.axiom_names + 0);
    CHECK(c.bound_global ==
          c.prob_axioms * (std::uint64_t(1) << c.axiom_names));
    CHECK(c.bound_inductive ==
          c.prob_axioms * (std::uint64_t(1) << c.max_width));
    CHECK(c.multiplications <= c.bound_inductive);
    interp_stats stats;
    (void)interpret_inductive(d, &stats);
    CHECK(stats.max_width == c.max_width);
    CHECK(stats.ops.multiplications == c.multiplications);
    CHECK(stats.ops.additions == c.additions);
  }
}

TEST_CASE("every reduction step preserves the meaning") {
  for (const char* src : {testkit::src_two_coin, testkit::src_coin_learning}) {
    term_ptr t = parse_program(src);
    infer_result inf = infer_ground(t);
    deriv_ptr cur = infer_low(inf.reduction.normal_form);
    factor reference = interpret_global(cur);
    std::vector<term_ptr> states = {t};
    for (const trace_entry& e : inf.reduction.steps) states.push_back(e.after);
    for (std::size_t i = inf.reduction.steps.size(); i-- > 0;) {
      cur = expand_step(cur, states[i], inf.reduction.steps[i].contracted);
      factor here = interpret_global(cur);
      CHECK(max_abs_diff(here, reference) <= kExact);
      decorated_node ind = interpret_inductive(cur);
      CHECK(max_abs_diff(ind.psi, reference) <= kExact);
    }
    CHECK(equal(*cur->concl.subject, *t));
  }
}

TEST_CASE("impossible evidence is reported as such") {
  term_ptr t = parse_program(R"(
    let x = sample bern(0.5) in
    let y = case x of {t => sample bern(1); f => sample bern(1)} in
    let e = obs(y = f) in
    <x, e>)");
  CHECK_THROWS_AS((void)posterior_query(t), zero_evidence);
}

TEST_CASE("unrolled state model hits the published size") {
  query_result q = posterior_query(parse_program(testkit::hmm_src(3)));
  CHECK(q.cost.prob_axioms == 7);
  CHECK(q.cost.axiom_names == 7);
  CHECK(q.cost.multiplications == 184);
  CHECK(q.cost.additions == 64);
  CHECK(q.cost.max_width == 6);
  CHECK(q.cost.bound_global == 896);
  CHECK(q.cost.bound_inductive == 448);
  REQUIRE(q.marginal.scope.size() == 4);
  CHECK(close(total(q.marginal), 1.0));

  // frozen aggregates: P(S3=t) and P(O1=t), derived by hand
  factor s3 = q.marginal;
  std::set<std::string> others;
  for (const auto& a : s3.scope) others.insert(a.name);
  // conclusion names sorted; the state is the unprimed last query entry
  std::string state = q.bn.query.back();
  others.erase(state);
  factor just_state = sum_out(s3, others);
  CHECK(close(just_state.table[1], 0.425));
  std::string first_emission = q.bn.query.front();
  others = {};
  for (const auto& a : q.marginal.scope) others.insert(a.name);
  others.erase(first_emission);
  factor just_o1 = sum_out(q.marginal, others);
  CHECK(close(just_o1.table[1], 0.5));
}
