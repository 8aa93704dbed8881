#include "tcmax/cone.hpp"
#include "tcmax/example3.hpp"
#include "tcmax/lp.hpp"
#include "tcmax/maximality.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace tcmax;

namespace {

// Dense random LP: n variables in [-5, 5], m mixed rows.
LinearProgram random_lp(std::size_t n, std::size_t m, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-6, 6);
    LinearProgram lp(n);
    for (std::size_t j = 0; j < n; ++j) lp.set_bound(j, Bound::between(-5, 5));
    for (std::size_t r = 0; r < m; ++r) {
        Vector row(n);
        for (auto& v : row) v = Rational(coef(rng), 1 + (coef(rng) & 3));
        lp.add_constraint(row, Relation::LessEqual, Rational(1 + (coef(rng) & 7)));
    }
    Vector c(n);
    for (auto& v : c) v = coef(rng);
    lp.set_objective(c, Sense::Maximize);
    return lp;
}

void BM_LpSolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto lp = random_lp(n, n, 17);
    for (auto _ : state) benchmark::DoNotOptimize(lp_solve(lp));
}
BENCHMARK(BM_LpSolve)->Arg(8)->Arg(16)->Arg(32);

void BM_Membership(benchmark::State& state) {
    const auto m = example3_market(10, static_cast<unsigned>(state.range(0)));
    const auto a = LiftedCone::attainable(m);
    const auto x = m.claim("theta").flat();
    for (auto _ : state) benchmark::DoNotOptimize(member(a, x));
}
BENCHMARK(BM_Membership)->Arg(4)->Arg(16)->Arg(64);

void BM_Polar(benchmark::State& state) {
    const auto m = example3_market(10, static_cast<unsigned>(state.range(0)));
    const auto a = LiftedCone::attainable(m);
    for (auto _ : state) benchmark::DoNotOptimize(polar(a, 64));
}
BENCHMARK(BM_Polar)->Arg(2)->Arg(4)->Arg(6);

void BM_IsMaximal(benchmark::State& state) {
    const auto m = example3_market(10, static_cast<unsigned>(state.range(0)));
    const auto x = m.claim("xi0");
    for (auto _ : state) benchmark::DoNotOptimize(is_maximal(m, x));
}
BENCHMARK(BM_IsMaximal)->Arg(4)->Arg(16)->Arg(64);

void BM_DensitySequence(benchmark::State& state) {
    const auto m = example3_market(10, 3);
    const auto x = m.claim("xi0");
    const auto M = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(density_sequence(m, x, M, {1, M}));
}
BENCHMARK(BM_DensitySequence)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
