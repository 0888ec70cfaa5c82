#include "ratex/exercise_mc.hpp"
#include "ratex/penalty_pde.hpp"
#include "ratex/reference_pricers.hpp"

#include <benchmark/benchmark.h>

namespace {

ratex::GridSpec grid_for(const ratex::MarketParams& m, benchmark::State& state) {
    ratex::GridSpec g = ratex::GridSpec::defaults_for(m, m.strike);
    g.n_space = static_cast<std::size_t>(state.range(0));
    g.n_time = static_cast<std::size_t>(state.range(1));
    return g;
}

void BM_SolveRational(benchmark::State& state) {
    const ratex::MarketParams m;
    const auto g = grid_for(m, state);
    const auto cfg = ratex::SolverConfig::defaults_for(m);
    const auto fam = ratex::IntensityFamily::exponential(static_cast<double>(state.range(2)));
    for (auto _ : state) benchmark::DoNotOptimize(ratex::solve_rational(m, g, fam, cfg).anchor_value());
}
BENCHMARK(BM_SolveRational)->Args({201, 500, 10})->Args({801, 2000, 10})->Args({801, 2000, 625})
    ->Unit(benchmark::kMillisecond);

void BM_PsorAmerican(benchmark::State& state) {
    const ratex::MarketParams m;
    const auto g = grid_for(m, state);
    const auto cfg = ratex::SolverConfig::defaults_for(m);
    for (auto _ : state) benchmark::DoNotOptimize(ratex::psor_american(m, g, cfg).surface.anchor_value());
}
BENCHMARK(BM_PsorAmerican)->Args({201, 500})->Args({801, 2000})->Unit(benchmark::kMillisecond);

void BM_BinomialAmerican(benchmark::State& state) {
    const ratex::MarketParams m;
    const auto steps = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ratex::binomial_american(m, 0.0, 100.0, steps));
}
BENCHMARK(BM_BinomialAmerican)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_McPrice(benchmark::State& state) {
    const ratex::MarketParams m;
    ratex::GridSpec g = ratex::GridSpec::defaults_for(m, m.strike);
    g.n_space = 401;
    g.n_time = 1000;
    const auto fam = ratex::IntensityFamily::exponential(10.0);
    const auto surface = ratex::solve_rational(m, g, fam, ratex::SolverConfig::defaults_for(m));
    ratex::MCConfig mc;
    mc.n_paths = static_cast<std::size_t>(state.range(0));
    mc.n_steps = 500;
    for (auto _ : state) benchmark::DoNotOptimize(ratex::mc_price(m, surface, fam, mc, 100.0).price);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McPrice)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
