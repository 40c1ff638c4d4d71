#include "usd2p/hullgeom.hpp"
#include "usd2p/lipmetric.hpp"
#include "usd2p/spaces.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace usd2p;

namespace {

std::vector<std::vector<double>> gaussian(std::size_t count, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> out(count, std::vector<double>(dim));
    for (auto& v : out)
        for (double& x : v) x = g(rng);
    return out;
}

const char* const kSpaces[] = {"lp(inf,12)", "lp(2,10)", "sup(4, lp(3,3))", "dsum(1, lp(2,3), lp(inf,3))"};

void BM_MinNormPoint(benchmark::State& state) {
    const Space s = Space::parse(kSpaces[state.range(0)]);
    const auto gens = gaussian(static_cast<std::size_t>(state.range(1)), s.dim(), 1);
    auto z = gaussian(1, s.dim(), 2).front();
    for (double& x : z) x *= 2.0;
    for (auto _ : state) benchmark::DoNotOptimize(min_norm_point(s, z, gens).distance);
    state.SetLabel(kSpaces[state.range(0)]);
}
BENCHMARK(BM_MinNormPoint)->ArgsProduct({{0, 1, 2, 3}, {4, 20}});

void BM_LipSeminorm(benchmark::State& state) {
    const auto m = geometric_chain(0.5, static_cast<std::size_t>(state.range(0)));
    std::vector<double> f(m.size());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& x : f) x = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(lip_seminorm(m, f));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LipSeminorm)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNSquared);

void BM_Descent(benchmark::State& state) {
    const Space x = Space::parse("lp(inf,2)");
    const CmParams p{3, 0.2, 1.0, static_cast<std::size_t>(state.range(0))};
    const std::vector<double> z{1, -1, -1, 1, 0.5, -0.5};
    DescentOptions o;
    o.seed = 5;
    o.budget = 60;
    for (auto _ : state) benchmark::DoNotOptimize(dist_to_cm_upper(x, z, p, o).upper);
}
BENCHMARK(BM_Descent)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_Grid(benchmark::State& state) {
    const Space x = Space::parse("lp(2,1)");
    const CmParams p{2, 0.1, 1.0, static_cast<std::size_t>(state.range(0))};
    const std::vector<double> z{1, -1};
    GridOptions g;
    g.resolution = 0.01;
    for (auto _ : state) benchmark::DoNotOptimize(dist_to_cm_grid(x, z, p, g).lower);
}
BENCHMARK(BM_Grid)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
