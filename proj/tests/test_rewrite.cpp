#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hobn/error.hpp"
#include "hobn/rewrite.hpp"
#include "hobn/surface.hpp"

#include "testkit.hpp"

using namespace hobn;

TEST_CASE("a shared thunk substitutes once and forces twice") {
  term_ptr t = parse_program(R"(
    let x = sample bern(0.5) in
    let y = !(case x of {t => sample bern(0.7); f => sample bern(0.4)}) in
    let y1 = der y in
    let y2 = der y in
    <y1, y2>)");
  reduce_result r = normalize(t);
  REQUIRE(r.steps.size() == 3);
  CHECK(r.steps[0].contracted.rule == rewrite_rule::substitute_let);
  CHECK(r.steps[1].contracted.rule == rewrite_rule::force_thunk);
  CHECK(r.steps[2].contracted.rule == rewrite_rule::force_thunk);
  CHECK(is_bn_normal_form(*r.normal_form));
  term_ptr expect = parse_program(R"(
    let x = sample bern(0.5) in
    let y1 = case x of {t => sample bern(0.7); f => sample bern(0.4)} in
    let y2 = case x of {t => sample bern(0.7); f => sample bern(0.4)} in
    <y1, y2>)");
  CHECK(alpha_equal(*r.normal_form, *expect));
}

TEST_CASE("value substitution reaches under the binding spine") {
  term_ptr t = parse_program(
      "let y1 = (let x = sample bern(0.5) in x) in <y1, y1>");
  reduce_result r = normalize(t);
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].contracted.rule == rewrite_rule::substitute_let);
  CHECK(alpha_equal(*r.normal_form,
                    *parse_program("let x = sample bern(0.5) in <x, x>")));
}

TEST_CASE("beta then force") {
  term_ptr t = parse_program("(\\w. der w) !(sample bern(0.5))");
  reduce_result r = normalize(t);
  REQUIRE(r.steps.size() == 2);
  CHECK(r.steps[0].contracted.rule == rewrite_rule::beta);
  CHECK(r.steps[1].contracted.rule == rewrite_rule::force_thunk);
  CHECK(r.normal_form->kind == term_kind::sample);
}

TEST_CASE("pair splitting substitutes both components") {
  term_ptr t = parse_program(R"(
    let x = sample bern(0.5) in
    let y = sample bern(0.6) in
    letp <a, b> = <x, y> in
    <b, a>)");
  reduce_result r = normalize(t);
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].contracted.rule == rewrite_rule::split_pair);
  term_ptr expect = parse_program(
      "let x = sample bern(0.5) in let y = sample bern(0.6) in <y, x>");
  CHECK(alpha_equal(*r.normal_form, *expect));
}

TEST_CASE("statement chains are already normal") {
  for (const char* src : {testkit::src_sprinkler, testkit::src_chain_direct,
                          testkit::src_chain_nested, testkit::src_rain_wet}) {
    term_ptr t = parse_program(src);
    CHECK(is_bn_normal_form(*t));
    CHECK(normalize(t).steps.empty());
    CHECK_FALSE(step(t).has_value());
  }
}

TEST_CASE("normal does not imply compiled") {
  term_ptr id = parse_program("\\x. x");
  CHECK(find_redexes(id).empty());
  CHECK_FALSE(step(id).has_value());
  CHECK_FALSE(is_bn_normal_form(*id));
  // a frozen computation is a value too
  term_ptr frozen = parse_program("!(let x = sample bern(0.5) in x)");
  CHECK(find_redexes(frozen).empty());
  CHECK_FALSE(is_bn_normal_form(*frozen));
}

TEST_CASE("macro arithmetic runs to numerals") {
  CHECK(alpha_equal(*normalize(parse_program("pred 2")).normal_form,
                    *parse_program("1")));
  CHECK(alpha_equal(*normalize(parse_program("pred 1")).normal_form,
                    *parse_program("0")));
  term_ptr picked = normalize(parse_program(R"(
    (ifZero 0) !(sample bern(0.9)) !(sample bern(0.1)))"))
                        .normal_form;
  REQUIRE(picked->kind == term_kind::sample);
  CHECK(picked->prob == rational{9, 10});
}

TEST_CASE("recorded traces replay exactly") {
  for (const char* src :
       {testkit::src_two_coin, testkit::src_coin_learning}) {
    term_ptr cur = parse_program(src);
    reduce_result r = normalize(cur);
    CHECK(!r.steps.empty());
    for (const trace_entry& e : r.steps) {
      term_ptr next = apply_redex(cur, e.contracted);
      CHECK(equal(*next, *e.after));
      cur = e.after;
    }
    CHECK(equal(*cur, *r.normal_form));
  }
  term_ptr hmm = parse_program(testkit::hmm_src(2));
  reduce_result r = normalize(hmm);
  term_ptr cur = hmm;
  for (const trace_entry& e : r.steps) cur = apply_redex(cur, e.contracted);
  CHECK(equal(*cur, *r.normal_form));
  CHECK(is_bn_normal_form(*r.normal_form));
}

TEST_CASE("reduction choices do not change the result") {
  term_ptr t = parse_program(testkit::src_two_coin);
  reduction_summary s = reduction_graph(t);
  CHECK(s.path_lengths.size() == 1);
  REQUIRE(s.normal_forms.size() == 1);
  CHECK(alpha_equal(*s.normal_forms[0], *normalize(t).normal_form));
}

TEST_CASE("fuel runs out on divergent programs") {
  term_ptr loop = parse_program("(fix !(\\rec. \\n. (der rec) n)) zero");
  CHECK_THROWS_AS((void)normalize(loop, 50), fuel_exhausted);
  CHECK_THROWS_AS((void)reduction_graph(loop, 50), fuel_exhausted);
  try {
    (void)normalize(loop, 25);
  } catch (const fuel_exhausted& e) {
    CHECK(e.steps == 25);
  }
}

TEST_CASE("spine freshening avoids the given names and stays deterministic") {
  term_ptr t = parse_program("let x = sample bern(0.5) in <x, x>");
  std::set<std::string> avoid = {"x"};
  term_ptr f1 = freshen_spine(t, avoid);
  term_ptr f2 = freshen_spine(t, avoid);
  CHECK(equal(*f1, *f2));
  CHECK(alpha_equal(*t, *f1));
  CHECK(f1->binder != "x");
}
