#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hobn/infer.hpp"
#include "hobn/semantics.hpp"
#include "hobn/surface.hpp"

using namespace hobn;

TEST_CASE("a one-coin program round-trips the pipeline") {
  auto t = parse_program("let x = sample bern(0.5) in x");
  auto q = posterior_query(t);
  CHECK(q.evidence == doctest::Approx(1.0));
  REQUIRE(q.marginal.table.size() == 2);
  CHECK(q.marginal.table[0] == doctest::Approx(0.5));
  CHECK(q.marginal.table[1] == doctest::Approx(0.5));
}
