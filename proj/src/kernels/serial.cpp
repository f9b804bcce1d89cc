// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include <algorithm>

#include "lines.hpp"

namespace hiwave::kernels::serial {

void lincomb(float a, std::span<const float> x, float b, std::span<const float> y, std::span<float> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<float>(static_cast<double>(a) * x[i] + static_cast<double>(b) * y[i]);
    }
}

void dwt_analyze_rows(std::span<const float> in, std::size_t planes, std::size_t h, std::size_t w,
                      FilterPair dec, Boundary b, std::span<float> lo, std::span<float> hi) {
    const std::size_t m = dwt_coeff_len(w, dec.lo.size(), b);
    for (std::size_t line = 0; line < planes * h; ++line) {
        detail::analyze_line(in.data() + line * w, 1, w, dec, b, lo.data() + line * m, hi.data() + line * m, 1);
    }
}

void dwt_analyze_cols(std::span<const float> in, std::size_t planes, std::size_t h, std::size_t w,
                      FilterPair dec, Boundary b, std::span<float> lo, std::span<float> hi) {
    const std::size_t m = dwt_coeff_len(h, dec.lo.size(), b);
    for (std::size_t p = 0; p < planes; ++p) {
        for (std::size_t x = 0; x < w; ++x) {
            detail::analyze_line(in.data() + p * h * w + x, w, h, dec, b, lo.data() + p * m * w + x,
                                 hi.data() + p * m * w + x, w);
        }
    }
}

void dwt_synthesize_rows(std::span<const float> lo, std::span<const float> hi, std::size_t planes,
                         std::size_t h, std::size_t m, FilterPair dec, Boundary b, std::size_t n, std::span<float> out) {
    for (std::size_t line = 0; line < planes * h; ++line) {
        detail::synthesize_line(lo.data() + line * m, hi.data() + line * m, 1, m, dec, b, n, out.data() + line * n, 1);
    }
}

void dwt_synthesize_cols(std::span<const float> lo, std::span<const float> hi, std::size_t planes,
                         std::size_t m, std::size_t w, FilterPair dec, Boundary b, std::size_t n, std::span<float> out) {
    for (std::size_t p = 0; p < planes; ++p) {
        for (std::size_t x = 0; x < w; ++x) {
            detail::synthesize_line(lo.data() + p * m * w + x, hi.data() + p * m * w + x, w, m, dec, b, n,
                                    out.data() + p * n * w + x, w);
        }
    }
}

void resample_rows(std::span<const float> in, std::size_t planes, std::size_t h, const ResampleTaps& taps,
                   std::span<float> out) {
    for (std::size_t line = 0; line < planes * h; ++line) {
        detail::resample_line(in.data() + line * taps.in_len, 1, taps, out.data() + line * taps.out_len, 1);
    }
}

void resample_cols(std::span<const float> in, std::size_t planes, std::size_t w, const ResampleTaps& taps,
                   std::span<float> out) {
    for (std::size_t p = 0; p < planes; ++p) {
        for (std::size_t x = 0; x < w; ++x) {
            detail::resample_line(in.data() + p * taps.in_len * w + x, w, taps,
                                  out.data() + p * taps.out_len * w + x, w);
        }
    }
}

double squared_distance(std::span<const float> a, std::span<const float> b) {
    // Same chunked summation order as the parallel variant.
    double total = 0.0;
    for (std::size_t begin = 0; begin < a.size(); begin += kReductionChunk) {
        const std::size_t end = std::min(a.size(), begin + kReductionChunk);
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double d = static_cast<double>(a[i]) - b[i];
            acc += d * d;
        }
        total += acc;
    }
    return total;
}

void mixture_combine(std::span<const float> z, std::span<const MixtureTerm> terms, std::span<float> out) {
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = detail::mixture_value(z[j], j, terms);
}

void blend_accumulate(std::span<float> acc, std::size_t channels, std::size_t canvas_h, std::size_t canvas_w,
                      std::span<const float> patch, std::size_t patch_h, std::size_t patch_w, std::size_t y0,
                      std::size_t x0, std::span<const float> weight) {
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t y = 0; y < patch_h; ++y) {
            detail::blend_row(acc.data() + (c * canvas_h + y0 + y) * canvas_w + x0,
                              patch.data() + (c * patch_h + y) * patch_w, weight.data() + y * patch_w, patch_w);
        }
    }
}

}  // namespace hiwave::kernels::serial
