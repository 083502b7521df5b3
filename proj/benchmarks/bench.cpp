#include <benchmark/benchmark.h>

#include "ctrlk/ctrlk.hpp"
#include "generators.hpp"
#include "geometric_gen.hpp"
#include "ksimplex_gen.hpp"

using namespace ctrlk;

namespace {

void TriangularInverse(benchmark::State& state) {
  gen::Rng rng(1);
  const Ring r = Ring::integers_mod(5);
  const BasedModule m = gen::labeled(r, "b", static_cast<std::size_t>(state.range(0)));
  const Poset order = gen::poset(m.basis(), rng, 0.5);
  const Morphism f = gen::triangular(m, order, rng);
  for (auto _ : state) benchmark::DoNotOptimize(invert_triangular(decompose_triangular(f, order, UnitKind::AllUnits)));
}
BENCHMARK(TriangularInverse)->Arg(4)->Arg(16)->Arg(48);

void InverseOracle(benchmark::State& state) {
  gen::Rng rng(1);
  const Ring r = Ring::integers_mod(5);
  const BasedModule m = gen::labeled(r, "b", static_cast<std::size_t>(state.range(0)));
  const DenseMatrix f = gen::triangular(m, gen::poset(m.basis(), rng, 0.5), rng).to_dense();
  for (auto _ : state) benchmark::DoNotOptimize(ring_matrix_inverse_oracle(r, f));
}
BENCHMARK(InverseOracle)->Arg(4)->Arg(16);

void Fold(benchmark::State& state) {
  gen::Rng rng(2);
  const ContractedComplex c = gen::contractible(Ring::integers(), rng, static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(fold_two_degrees(c));
}
BENCHMARK(Fold)->Arg(2)->Arg(6)->Arg(12);

void Enlarge(benchmark::State& state) {
  gen::Rng rng(3);
  const ControlSpace x = gen::random_graph(rng, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const PointSet y = gen::random_subset(x, rng, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(enlarge(x, y, 3.5));
}
BENCHMARK(Enlarge)->Arg(30)->Arg(200);

void ControlledInverse(benchmark::State& state) {
  gen::Rng rng(4);
  const auto in = gen::triangular_instance(Ring::integers(), rng, static_cast<int>(state.range(0)), false);
  for (auto _ : state) benchmark::DoNotOptimize(controlled_triangular_inverse(in.rm, in.f, in.order, in.eps));
}
BENCHMARK(ControlledInverse)->Arg(12)->Arg(60);

void Cellular(benchmark::State& state) {
  SimplicialInput k;
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) k.coords["v" + std::to_string(i) + "_" + std::to_string(j)] = {i * 0.5, j * 0.5};
  auto v = [](int i, int j) { return "v" + std::to_string(i) + "_" + std::to_string(j); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      k.simplices.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
      k.simplices.push_back({v(i, j), v(i, j + 1), v(i + 1, j + 1)});
    }
  for (auto _ : state) benchmark::DoNotOptimize(cellular_chains(k, 1.0));
}
BENCHMARK(Cellular)->Arg(2)->Arg(5);

void VolodinCheck(benchmark::State& state) {
  gen::Rng rng(5);
  const VolodinPath p = gen::volodin_path(Ring::integers(), rng, static_cast<int>(state.range(0)), 6, SignMode::One);
  for (auto _ : state) benchmark::DoNotOptimize(volodin_check(p));
}
BENCHMARK(VolodinCheck)->Arg(4)->Arg(12);

}  // namespace
BENCHMARK_MAIN();
