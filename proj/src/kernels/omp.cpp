// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include <algorithm>
#include <vector>

#include "lines.hpp"

namespace hiwave::kernels::omp {

namespace {
using index_t = std::ptrdiff_t;  // OpenMP loop variables must be signed
}

void lincomb(float a, std::span<const float> x, float b, std::span<const float> y, std::span<float> out) {
    const auto n = static_cast<index_t>(out.size());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) {
        out[i] = static_cast<float>(static_cast<double>(a) * x[i] + static_cast<double>(b) * y[i]);
    }
}

void dwt_analyze_rows(std::span<const float> in, std::size_t planes, std::size_t h, std::size_t w,
                      FilterPair dec, Boundary b, std::span<float> lo, std::span<float> hi) {
    const std::size_t m = dwt_coeff_len(w, dec.lo.size(), b);
    const auto lines = static_cast<index_t>(planes * h);
#pragma omp parallel for schedule(static)
    for (index_t line = 0; line < lines; ++line) {
        const auto l = static_cast<std::size_t>(line);
        detail::analyze_line(in.data() + l * w, 1, w, dec, b, lo.data() + l * m, hi.data() + l * m, 1);
    }
}

void dwt_analyze_cols(std::span<const float> in, std::size_t planes, std::size_t h, std::size_t w,
                      FilterPair dec, Boundary b, std::span<float> lo, std::span<float> hi) {
    const std::size_t m = dwt_coeff_len(h, dec.lo.size(), b);
    const auto lines = static_cast<index_t>(planes * w);
#pragma omp parallel for schedule(static)
    for (index_t line = 0; line < lines; ++line) {
        const auto p = static_cast<std::size_t>(line) / w;
        const auto x = static_cast<std::size_t>(line) % w;
        detail::analyze_line(in.data() + p * h * w + x, w, h, dec, b, lo.data() + p * m * w + x,
                             hi.data() + p * m * w + x, w);
    }
}

void dwt_synthesize_rows(std::span<const float> lo, std::span<const float> hi, std::size_t planes,
                         std::size_t h, std::size_t m, FilterPair dec, Boundary b, std::size_t n, std::span<float> out) {
    const auto lines = static_cast<index_t>(planes * h);
#pragma omp parallel for schedule(static)
    for (index_t line = 0; line < lines; ++line) {
        const auto l = static_cast<std::size_t>(line);
        detail::synthesize_line(lo.data() + l * m, hi.data() + l * m, 1, m, dec, b, n, out.data() + l * n, 1);
    }
}

void dwt_synthesize_cols(std::span<const float> lo, std::span<const float> hi, std::size_t planes,
                         std::size_t m, std::size_t w, FilterPair dec, Boundary b, std::size_t n, std::span<float> out) {
    const auto lines = static_cast<index_t>(planes * w);
#pragma omp parallel for schedule(static)
    for (index_t line = 0; line < lines; ++line) {
        const auto p = static_cast<std::size_t>(line) / w;
        const auto x = static_cast<std::size_t>(line) % w;
        detail::synthesize_line(lo.data() + p * m * w + x, hi.data() + p * m * w + x, w, m, dec, b, n,
                                out.data() + p * n * w + x, w);
    }
}

void resample_rows(std::span<const float> in, std::size_t planes, std::size_t h, const ResampleTaps& taps,
                   std::span<float> out) {
    const auto lines = static_cast<index_t>(planes * h);
#pragma omp parallel for schedule(static)
    for (index_t line = 0; line < lines; ++line) {
        const auto l = static_cast<std::size_t>(line);
        detail::resample_line(in.data() + l * taps.in_len, 1, taps, out.data() + l * taps.out_len, 1);
    }
}

void resample_cols(std::span<const float> in, std::size_t planes, std::size_t w, const ResampleTaps& taps,
                   std::span<float> out) {
    const auto lines = static_cast<index_t>(planes * w);
#pragma omp parallel for schedule(static)
    for (index_t line = 0; line < lines; ++line) {
        const auto p = static_cast<std::size_t>(line) / w;
        const auto x = static_cast<std::size_t>(line) % w;
        detail::resample_line(in.data() + p * taps.in_len * w + x, w, taps, out.data() + p * taps.out_len * w + x, w);
    }
}

double squared_distance(std::span<const float> a, std::span<const float> b) {
    // Fixed chunking, partials summed in chunk order.
    const std::size_t chunks = (a.size() + kReductionChunk - 1) / kReductionChunk;
    std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
    for (index_t ci = 0; ci < static_cast<index_t>(chunks); ++ci) {
        const std::size_t begin = static_cast<std::size_t>(ci) * kReductionChunk;
        const std::size_t end = std::min(a.size(), begin + kReductionChunk);
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double d = static_cast<double>(a[i]) - b[i];
            acc += d * d;
        }
        partial[static_cast<std::size_t>(ci)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

void mixture_combine(std::span<const float> z, std::span<const MixtureTerm> terms, std::span<float> out) {
    const auto n = static_cast<index_t>(z.size());
#pragma omp parallel for schedule(static)
    for (index_t j = 0; j < n; ++j) {
        const auto u = static_cast<std::size_t>(j);
        out[u] = detail::mixture_value(z[u], u, terms);
    }
}

void blend_accumulate(std::span<float> acc, std::size_t channels, std::size_t canvas_h, std::size_t canvas_w,
                      std::span<const float> patch, std::size_t patch_h, std::size_t patch_w, std::size_t y0,
                      std::size_t x0, std::span<const float> weight) {
    const auto rows = static_cast<index_t>(channels * patch_h);
#pragma omp parallel for schedule(static)
    for (index_t r = 0; r < rows; ++r) {
        const auto c = static_cast<std::size_t>(r) / patch_h;
        const auto y = static_cast<std::size_t>(r) % patch_h;
        detail::blend_row(acc.data() + (c * canvas_h + y0 + y) * canvas_w + x0,
                          patch.data() + (c * patch_h + y) * patch_w, weight.data() + y * patch_w, patch_w);
    }
}

}  // namespace hiwave::kernels::omp
