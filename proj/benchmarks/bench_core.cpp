#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "builtins.hpp"
#include "metallab/propcheck.hpp"
#include "metallab/slant.hpp"

namespace {

using namespace metallab;

const ImmersionScenario& scenario(const char* name) {
  static std::map<std::string, ImmersionScenario> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, cli::load_builtin(name).scenario).first;
  return it->second;
}

void BM_Parse(benchmark::State& state) {
  const std::vector<std::string> vars = {"u", "v", "w"};
  for (auto _ : state) benchmark::DoNotOptimize(parse("sqrt(2)/sqrt(3)*u + sin(v*w)^2 - log(1 + u^2)/(2 + cos(w))", vars));
}
BENCHMARK(BM_Parse);

void BM_EvalJet2(benchmark::State& state) {
  const std::vector<std::string> vars = {"u", "v", "w"};
  const Expr e = parse("sqrt(2)/sqrt(3)*u + sin(v*w)^2 - log(1 + u^2)/(2 + cos(w))", vars);
  const Point pt{vars, {0.3, -0.7, 1.1}};
  for (auto _ : state) benchmark::DoNotOptimize(eval_jet2(e, pt));
}
BENCHMARK(BM_EvalJet2);

void BM_FrameAt(benchmark::State& state, const char* name) {
  const auto& scn = scenario(name);
  const Vec pt = scn.sample_points(1, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(frame_at(scn, pt));
}
BENCHMARK_CAPTURE(BM_FrameAt, example1, "example1");
BENCHMARK_CAPTURE(BM_FrameAt, example2, "example2");
BENCHMARK_CAPTURE(BM_FrameAt, paraboloid, "paraboloid");

void BM_InducedOps(benchmark::State& state) {
  const auto& scn = scenario("example2");
  const auto geom = frame_at(scn, scn.sample_points(1, 1)[0]);
  for (auto _ : state) benchmark::DoNotOptimize(induced_ops(geom, scn.structure));
}
BENCHMARK(BM_InducedOps);

void BM_Classify(benchmark::State& state) {
  auto scn = scenario("example2");
  scn.sampling.count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(classify(scn));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Classify)->Arg(50)->Arg(200);

void BM_RunCheck(benchmark::State& state, CheckId id, const char* name) {
  const auto& scn = scenario(name);
  for (auto _ : state) benchmark::DoNotOptimize(run_check(id, scn, 200, 7));
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK_CAPTURE(BM_RunCheck, E99_example2, CheckId::E99, "example2");
BENCHMARK_CAPTURE(BM_RunCheck, E17i_paraboloid, CheckId::E17i, "paraboloid");
BENCHMARK_CAPTURE(BM_RunCheck, E29_example1, CheckId::E29_DERIV, "example1");

void BM_FullSuite(benchmark::State& state) {
  const auto& scn = scenario("example2");
  const auto ids = parse_check_list("all");
  for (auto _ : state) benchmark::DoNotOptimize(run_suite(scn, ids, 200, 7));
}
BENCHMARK(BM_FullSuite)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
