// bench_main.cpp — kernel timings: exponential, contraction, tooth SDP, ISS sweep

#include <benchmark/benchmark.h>

#include <random>

#include "pmetro/comb.hpp"
#include "pmetro/iss.hpp"

namespace {

using namespace pmetro;

embedding::Liouvillian figure_liouvillian() {
    return embedding::build_liouvillian(embedding::PseudomodeModel::lorentzian({2.457, 2.5, 0.0}));
}

CMat random_hermitian(Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMat g(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) g(i, j) = cplx(n(rng), n(rng));
    return 0.5 * (g + g.adjoint());
}

void BM_Expm(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const CMat a = random_hermitian(state.range(0), rng) * cplx(0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(expm(a));
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(16)->Arg(64);

void BM_ExpmFrechet(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const CMat a = random_hermitian(state.range(0), rng);
    const CMat e = random_hermitian(state.range(0), rng);
    for (auto _ : state) benchmark::DoNotOptimize(expm_frechet(a, e));
}
BENCHMARK(BM_ExpmFrechet)->Arg(16);

void BM_ContractCorrelated(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const int n = static_cast<int>(state.range(0));
    const auto cc = comb::ChannelComb::correlated(figure_liouvillian(), 0.5, n);
    const auto s = comb::random_strategy(n, 2, 2, rng);
    for (auto _ : state) benchmark::DoNotOptimize(comb::contract(s, cc));
}
BENCHMARK(BM_ContractCorrelated)->Arg(2)->Arg(8)->Arg(16);

void BM_ToothStep(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const Index d = state.range(0);
    const CMat dm = random_hermitian(d * d, rng);
    for (auto _ : state) benchmark::DoNotOptimize(iss::tooth_step(dm, d, d));
}
BENCHMARK(BM_ToothStep)->Arg(2)->Arg(4);

void BM_IssSweep(benchmark::State& state) {
    std::mt19937_64 rng(5);
    const int n = static_cast<int>(state.range(0));
    const auto cc = comb::ChannelComb::correlated(figure_liouvillian(), 0.5, n);
    const auto s0 = comb::random_strategy(n, 2, 2, rng);
    const CMat l = iss::l_step(comb::contract(s0, cc));
    for (auto _ : state) {
        auto s = s0;
        benchmark::DoNotOptimize(iss::sweep(s, cc, l, 1e-10));
    }
}
BENCHMARK(BM_IssSweep)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
