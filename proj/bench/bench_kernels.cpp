// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

// Serial reference kernels against their OpenMP counterparts. The thread
// count comes from OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "hiwave/kernels.hpp"
#include "hiwave/rng.hpp"
#include "hiwave/tiling.hpp"
#include "hiwave/wavelet.hpp"

namespace {

namespace k = hiwave::kernels;

std::vector<float> data(std::size_t n, std::uint64_t seed) {
    hiwave::Rng rng(seed);
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    return v;
}

// Three planes of side x side, the shape of one RGB latent.
constexpr std::size_t kPlanes = 3;

template <bool Parallel>
void BM_lincomb(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0)) * static_cast<std::size_t>(state.range(0)) * kPlanes;
    const auto x = data(n, 1), y = data(n, 2);
    std::vector<float> out(n);
    for (auto _ : state) {
        if constexpr (Parallel) k::omp::lincomb(0.3f, x, 0.7f, y, out);
        else k::serial::lincomb(0.3f, x, 0.7f, y, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_dwt_rows(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto in = data(kPlanes * side * side, 3);
    const auto& f = hiwave::WaveletFilter::sym4();
    const k::FilterPair dec{f.dec_lo, f.dec_hi};
    const std::size_t m = k::dwt_coeff_len(side, f.length(), k::Boundary::periodization);
    std::vector<float> lo(kPlanes * side * m), hi(lo.size());
    for (auto _ : state) {
        if constexpr (Parallel) k::omp::dwt_analyze_rows(in, kPlanes, side, side, dec, k::Boundary::periodization, lo, hi);
        else k::serial::dwt_analyze_rows(in, kPlanes, side, side, dec, k::Boundary::periodization, lo, hi);
        benchmark::DoNotOptimize(lo.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.size()));
}

template <bool Parallel>
void BM_dwt_cols(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto in = data(kPlanes * side * side, 4);
    const auto& f = hiwave::WaveletFilter::sym4();
    const k::FilterPair dec{f.dec_lo, f.dec_hi};
    const std::size_t m = k::dwt_coeff_len(side, f.length(), k::Boundary::periodization);
    std::vector<float> lo(kPlanes * m * side), hi(lo.size());
    for (auto _ : state) {
        if constexpr (Parallel) k::omp::dwt_analyze_cols(in, kPlanes, side, side, dec, k::Boundary::periodization, lo, hi);
        else k::serial::dwt_analyze_cols(in, kPlanes, side, side, dec, k::Boundary::periodization, lo, hi);
        benchmark::DoNotOptimize(lo.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.size()));
}

template <bool Parallel>
void BM_resample(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto in = data(kPlanes * side * side, 5);
    const auto taps = k::lanczos_taps(side, 2 * side, 3);
    std::vector<float> tmp(kPlanes * side * 2 * side), out(kPlanes * 4 * side * side);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::omp::resample_rows(in, kPlanes, side, taps, tmp);
            k::omp::resample_cols(tmp, kPlanes, 2 * side, taps, out);
        } else {
            k::serial::resample_rows(in, kPlanes, side, taps, tmp);
            k::serial::resample_cols(tmp, kPlanes, 2 * side, taps, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Parallel>
void BM_squared_distance(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0)) * static_cast<std::size_t>(state.range(0)) * kPlanes;
    const auto a = data(n, 6), b = data(n, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? k::omp::squared_distance(a, b) : k::serial::squared_distance(a, b));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_mixture_combine(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0)) * static_cast<std::size_t>(state.range(0)) * kPlanes;
    const auto z = data(n, 8), m0 = data(n, 9), m1 = data(n, 10), m2 = data(n, 11), m3 = data(n, 12);
    const k::MixtureTerm terms[] = {{m0, 0.1, 0.2}, {m1, 0.1, 0.2}, {m2, 0.1, 0.2}, {m3, 0.1, 0.2}};
    std::vector<float> out(n);
    for (auto _ : state) {
        if constexpr (Parallel) k::omp::mixture_combine(z, terms, out);
        else k::serial::mixture_combine(z, terms, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_blend(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto layout = hiwave::plan_layout(side, side, 64, 64);
    const auto patch = data(kPlanes * 64 * 64, 13);
    std::vector<float> acc(kPlanes * side * side);
    for (auto _ : state) {
        for (std::size_t p = 0; p < layout.size(); ++p) {
            const auto o = layout.origin(p);
            if constexpr (Parallel) {
                k::omp::blend_accumulate(acc, kPlanes, side, side, patch, 64, 64, o.y, o.x, layout.weight(p));
            } else {
                k::serial::blend_accumulate(acc, kPlanes, side, side, patch, 64, 64, o.y, o.x, layout.weight(p));
            }
        }
        benchmark::DoNotOptimize(acc.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(layout.size() * patch.size()));
}

#define HIWAVE_BENCH_PAIR(name)                                              \
    BENCHMARK(name<false>)->Name(#name "/serial")->Arg(64)->Arg(256)->Arg(1024); \
    BENCHMARK(name<true>)->Name(#name "/omp")->Arg(64)->Arg(256)->Arg(1024)

HIWAVE_BENCH_PAIR(BM_lincomb);
HIWAVE_BENCH_PAIR(BM_dwt_rows);
HIWAVE_BENCH_PAIR(BM_dwt_cols);
HIWAVE_BENCH_PAIR(BM_resample);
HIWAVE_BENCH_PAIR(BM_squared_distance);
HIWAVE_BENCH_PAIR(BM_mixture_combine);
HIWAVE_BENCH_PAIR(BM_blend);

}  // namespace

BENCHMARK_MAIN();
