#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

#include "jetscope/classify.hpp"
#include "jetscope/norms.hpp"
#include "jetscope/pde.hpp"
#include "jetscope/signals.hpp"
#include "jetscope/whitney.hpp"

using namespace jetscope;

namespace {

const Grid& line(int n) {
  static std::map<int, Grid> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Grid::line(-1.0, 1.0, n)).first;
  return it->second;
}

void BM_DualNormOrderZero(benchmark::State& state) {
  const auto t = DistributionRep::from_field(
      SampledField::sample(line(static_cast<int>(state.range(0))), [](const Point& x) { return std::cos(3.0 * x[0]); }));
  const Ball unit(Point{}, 1.0, true);
  for (auto _ : state)
    benchmark::DoNotOptimize(norms::dual_norm(t, unit, norms::NormSpec(0, 1.5), norms::DualMethod::Optimization));
}
BENCHMARK(BM_DualNormOrderZero)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);

void BM_DualNormRiesz(benchmark::State& state) {
  const auto t = DistributionRep::from_field(
      SampledField::sample(line(static_cast<int>(state.range(0))), [](const Point& x) { return std::abs(x[0]); }));
  const Ball s(Point{}, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(norms::dual_norm(t, s, norms::NormSpec(1, 2.0)));
}
BENCHMARK(BM_DualNormRiesz)->Arg(4097)->Arg(16385)->Unit(benchmark::kMillisecond);

void BM_PolylaplacianSquare(benchmark::State& state) {
  const Grid g = Grid::square(-1.0, 1.0, static_cast<int>(state.range(0)));
  const auto f = SampledField::sample(g, [](const Point& x) { return std::sin(x[0]) * x[1]; });
  for (auto _ : state) {
    pde::clear_solver_cache();
    benchmark::DoNotOptimize(pde::solve_polylaplacian(f, g.box(), static_cast<int>(state.range(1))));
  }
}
BENCHMARK(BM_PolylaplacianSquare)->Args({129, 1})->Args({129, 2})->Args({257, 1})->Unit(benchmark::kMillisecond);

void BM_ClassifyPoint(benchmark::State& state) {
  const auto t = DistributionRep::from_field(make_signal(parse_signal("xabsx"), line(16385)));
  const auto ladder = classify::dyadic_ladder(0.125, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(classify::classify_point(t, Point{0.1, 0.0}, 3, norms::NormSpec(0, 2.0), ladder));
}
BENCHMARK(BM_ClassifyPoint)->Unit(benchmark::kMillisecond);

void BM_WhitneyCover(benchmark::State& state) {
  const Grid& g = line(static_cast<int>(state.range(0)));
  std::vector<char> mask(g.size(), 0);
  mask[g.size() / 2] = 1;
  for (auto _ : state) benchmark::DoNotOptimize(whitney::build_cover(g, mask, 0.01));
}
BENCHMARK(BM_WhitneyCover)->Arg(10001)->Arg(40001)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
