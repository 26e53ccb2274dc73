#include "distopt/analysis.hpp"
#include "distopt/engine.hpp"
#include "distopt/rng.hpp"

#include <benchmark/benchmark.h>

using namespace distopt;

namespace {

Problem quadratic_problem(int s, int d) {
  Rng rng(1);
  const auto set = FeasibleSet::box(Point::Constant(d, -2), Point::Constant(d, 2));
  std::vector<ComponentFunction> cs;
  for (int i = 0; i < s; ++i) {
    Matrix a = Matrix::Identity(d, d);
    Point b(d);
    for (int k = 0; k < d; ++k) b[k] = rng.normal();
    auto c = ComponentFunction::quadratic(std::to_string(i), a, b, 0, 1, 1);
    const auto bounds = analytic_bounds(c, set);
    cs.push_back(c.with_bounds(bounds.grad_bound, bounds.lipschitz));
  }
  return {d, std::move(cs), set};
}

StateMatrix random_states(int s, int d) {
  Rng rng(2);
  StateMatrix x(d, s);
  for (int j = 0; j < s; ++j)
    for (int k = 0; k < d; ++k) x(k, j) = rng.normal();
  return x;
}

void BM_Fuse(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const auto b = build_metropolis(Graph::ring(s));
  const StateMatrix x = random_states(s, 5);
  for (auto _ : state) benchmark::DoNotOptimize(fuse(x, b));
}
BENCHMARK(BM_Fuse)->Arg(6)->Arg(20)->Arg(100);

void BM_ContractionCoefficient(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  const auto b = build_metropolis(Graph::ring(s));
  for (auto _ : state) benchmark::DoNotOptimize(contraction_coefficient(b));
}
BENCHMARK(BM_ContractionCoefficient)->Arg(6)->Arg(20)->Arg(100);

// Rounds per second of a full run, with and without invariant monitoring.
void BM_Run(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  RunConfig cfg{quadratic_problem(s, 5), WeightSchedule::fixed(build_metropolis(Graph::ring(s))),
                StepSchedule(), 10000};
  cfg.decimate = 10000;
  cfg.monitor_invariants = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.n_iterations);
}
BENCHMARK(BM_Run)->Args({6, 0})->Args({6, 1})->Args({20, 0})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
