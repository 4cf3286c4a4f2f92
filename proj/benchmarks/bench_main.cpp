#include "distsec/distsec.hpp"

#include <benchmark/benchmark.h>

#include <optional>

using namespace distsec;

namespace {

void greedy_double(benchmark::State& state)
{
    const auto a = uniform_range<double>(1, state.range(0));
    const auto k = static_cast<unsigned>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(greedy_code(a, k));
}
BENCHMARK(greedy_double)->Args({20, 1})->Args({256, 4})->Args({1024, 8});

void greedy_delta_exact(benchmark::State& state)
{
    const auto a = uniform_range<Rational>(1, state.range(0));
    const auto code = greedy_code(a, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(delta_closed_form(code, a));
}
BENCHMARK(greedy_delta_exact)->Arg(16)->Arg(128);

void exchange(benchmark::State& state)
{
    const auto a = uniform_range<double>(1, state.range(0));
    const auto k = static_cast<unsigned>(state.range(1));
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(complete_key_assignment(exchange_binning(a, k, a.size(), seed++)));
}
BENCHMARK(exchange)->Args({16, 2})->Args({64, 4})->Args({256, 6});

void optimal_search(benchmark::State& state)
{
    const auto a = uniform_range<double>(1, state.range(0));
    const auto k = static_cast<unsigned>(state.range(1));
    SearchOptions opt;
    opt.jobs = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(brute_force_optimal(a, k, opt));
}
BENCHMARK(optimal_search)->Args({4, 1})->Args({6, 1})->Args({5, 2})->Unit(benchmark::kMillisecond);

void joint_sum(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = uniform_range<double>(1, 8);
    const auto code = greedy_code(a, 2);
    std::vector<std::vector<std::optional<std::vector<double>>>> terms(n);
    for (std::size_t l = 0; l < n; ++l) {
        terms[l].assign(n, std::nullopt);
        terms[l][l] = a.values();
    }
    JointSystem<double> sys{std::vector<Alphabet<double>>(n, a), std::vector<KeyedCode>(n, code),
                            SeparableFunction<double>(std::vector<std::size_t>(n, 8), terms)};
    for (auto _ : state)
        benchmark::DoNotOptimize(joint_distortion(sys));
}
BENCHMARK(joint_sum)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
