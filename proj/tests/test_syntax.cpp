#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hobn/error.hpp"
#include "hobn/prelude.hpp"
#include "hobn/surface.hpp"
#include "hobn/term.hpp"

#include "testkit.hpp"

using namespace hobn;

static const char* fixtures[] = {
    testkit::src_sprinkler,    testkit::src_sprinkler_posterior,
    testkit::src_rain_wet,     testkit::src_coin_learning,
    testkit::src_two_coin,     testkit::src_chain_direct,
    testkit::src_chain_nested, testkit::src_shared_sample,
    testkit::src_fork_alias,
};

TEST_CASE("pretty printing round trips through the parser") {
  for (const char* src : fixtures) {
    term_ptr t = parse_program(src);
    term_ptr back = parse_program(pretty(*t));
    CHECK(equal(*t, *back));
  }
  for (int n : {0, 1, 3}) {
    term_ptr t = parse_program(testkit::hmm_src(n));
    CHECK(equal(*t, *parse_program(pretty(*t))));
  }
}

TEST_CASE("numeral literals expand to the nested thunk encoding") {
  for (std::uint64_t n : {0u, 1u, 2u, 5u}) {
    term_ptr lit = parse_program(std::to_string(n));
    term_ptr enc = desugar(expand_macros(numeral_encoding(n)));
    CHECK(alpha_equal(*lit, *enc));
  }
  CHECK_FALSE(alpha_equal(*parse_program("2"), *parse_program("3")));
  CHECK(is_value(*parse_program("4")));
}

TEST_CASE("prelude macros expand to closed values of the encoding") {
  for (const char* m : {"zero", "succ", "pred", "ifZero", "fix"}) {
    term_ptr t = parse_program(m);
    CHECK(free_vars(*t).empty());
  }
  CHECK(alpha_equal(*parse_program("zero"),
                    *parse_program("!(\\z. \\s. der z)")));
  CHECK(alpha_equal(*parse_program("succ"),
                    *parse_program("\\m. !(\\z. \\s. (der s) m)")));
}

TEST_CASE("tuples nest to the right") {
  term_ptr t = parse_program(
      "let a = sample bern(0.5) in let b = a in let c = a in <a, b, c>");
  const term* body = t.get();
  while (body->kind == term_kind::let_in) body = body->children[1].get();
  REQUIRE(body->kind == term_kind::pair_value);
  CHECK(body->children[0]->kind == term_kind::variable);
  CHECK(body->children[0]->name == "a");
  REQUIRE(body->children[1]->kind == term_kind::pair_value);
  CHECK(body->children[1]->children[0]->name == "b");
  CHECK(body->children[1]->children[1]->name == "c");
}

TEST_CASE("case clauses are stored by pattern index") {
  term_ptr t = parse_program(R"(
    let x = sample bern(0.5) in
    let y = sample bern(0.5) in
    case <x, y> of {
      <t, t> => sample bern(0.1);
      <t, f> => sample bern(0.2);
      <f, t> => sample bern(0.3);
      <f, f> => sample bern(0.4)
    })");
  const term* body = t.get();
  while (body->kind == term_kind::let_in) body = body->children[1].get();
  REQUIRE(body->kind == term_kind::case_of);
  CHECK(body->case_arity == 2);
  REQUIRE(body->clauses.size() == 4);
  // <f,f> is index 0, first component most significant
  CHECK(body->clauses[0] == rational{2, 5});
  CHECK(body->clauses[1] == rational{3, 10});
  CHECK(body->clauses[2] == rational{1, 5});
  CHECK(body->clauses[3] == rational{1, 10});
  // order of clauses in the source is free
  term_ptr shuffled = parse_program(R"(
    let x = sample bern(0.5) in
    let y = sample bern(0.5) in
    case <x, y> of {
      <f, f> => sample bern(0.4);
      <f, t> => sample bern(0.3);
      <t, f> => sample bern(0.2);
      <t, t> => sample bern(0.1)
    })");
  CHECK(equal(*t, *shuffled));
}

TEST_CASE("wide tuple patterns desugar to nested splits") {
  term_ptr t = parse_program(testkit::src_coin_learning);
  // the scrutinee is a computation, so an administrative let hoists it
  const term* at = t.get();
  while (at->kind == term_kind::let_in) at = at->children[1].get();
  REQUIRE(at->kind == term_kind::letp_in);
  CHECK(at->binder == "x");
  CHECK(at->children[0]->kind == term_kind::variable);
  const term* rest = at->children[1].get();
  REQUIRE(rest->kind == term_kind::letp_in);
  CHECK(rest->binder == "y1");
  CHECK(rest->binder2 == "y2");
  CHECK(rest->children[0]->kind == term_kind::variable);
  CHECK(rest->children[0]->name == at->binder2);
}

TEST_CASE("administrative binders avoid program identifiers") {
  // _0 is taken, so the desugarer must skip it
  term_ptr t = parse_program(
      "let _0 = sample bern(0.5) in <_0, obs(_0 = t)>");
  std::set<std::string> names = all_names(*t);
  CHECK(names.count("_0") == 1);
  CHECK(names.count("_1") == 1);
  term_ptr back = parse_program(pretty(*t));
  CHECK(equal(*t, *back));
}

TEST_CASE("comments and whitespace are ignored") {
  term_ptr a = parse_program("# heading\nlet x = sample bern(0.5) in # tail\nx");
  term_ptr b = parse_program("let x = sample bern(0.5) in x");
  CHECK(equal(*a, *b));
}

TEST_CASE("malformed programs raise syntax errors with a location") {
  const char* bad[] = {
      "let x = sample bern(0.5) in case x of {t => sample bern(0.9)}",
      "let x = sample bern(0.5) in <x",
      "sample 0.5",
      "let x = sample bern(0.5) in obs(x = 5)",
      "let x = in x",
      "case of {}",
      "let x = sample bern(3/2) in x",
  };
  for (const char* src : bad) {
    try {
      (void)parse_program(src);
      FAIL_CHECK("expected syntax error: " << src);
    } catch (const syntax_error& e) {
      CHECK(e.line >= 1);
      CHECK(e.col >= 1);
    }
  }
}

TEST_CASE("observation sugar prints back as written") {
  term_ptr t = parse_program(testkit::src_rain_wet);
  std::string p = pretty(*t);
  CHECK(p.find("obs(wet = t)") != std::string::npos);
  CHECK(p.find("sample bern(1/5)") != std::string::npos);
}
