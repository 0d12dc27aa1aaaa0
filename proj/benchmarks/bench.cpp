#include <benchmark/benchmark.h>

#include <string>

#include "hobn/factor.hpp"
#include "hobn/semantics.hpp"
#include "hobn/surface.hpp"

namespace {

using namespace hobn;

factor chain_factor(int vars) {
  factor f = unit_factor();
  for (int i = 0; i < vars; ++i) {
    factor g;
    g.scope = {{"V" + std::to_string(i), std::nullopt}};
    g.table = {0.4, 0.6};
    f = product(f, g);
  }
  return f;
}

void bm_product(benchmark::State& state) {
  factor a = chain_factor(static_cast<int>(state.range(0)));
  factor b = chain_factor(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(product(a, b));
}
BENCHMARK(bm_product)->Arg(4)->Arg(8)->Arg(12);

void bm_sum_out(benchmark::State& state) {
  factor a = chain_factor(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sum_out(a, {"V0"}));
}
BENCHMARK(bm_sum_out)->Arg(4)->Arg(8)->Arg(12);

std::string hmm_source(int steps) {
  std::string src = "let s0 = sample bern(0.6) in\n";
  for (int i = 1; i <= steps; ++i) {
    std::string p = std::to_string(i - 1), c = std::to_string(i);
    src += "let s" + c + " = case s" + p +
           " of {t => sample bern(0.7); f => sample bern(0.2)} in\n";
    src += "let o" + c + " = case s" + c +
           " of {t => sample bern(0.9); f => sample bern(0.1)} in\n";
  }
  std::string tuple = "<o1";
  for (int i = 2; i <= steps; ++i) tuple += ", o" + std::to_string(i);
  tuple += ", s" + std::to_string(steps) + ">";
  return src + tuple + "\n";
}

void bm_posterior_query(benchmark::State& state) {
  auto t = parse_program(hmm_source(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(posterior_query(t));
}
BENCHMARK(bm_posterior_query)->Arg(2)->Arg(4)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
