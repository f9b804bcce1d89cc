// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

// Per-line bodies shared by the serial and OpenMP kernels. Only the loop over
// lines differs between the two variants.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>

#include "hiwave/kernels.hpp"

namespace hiwave::kernels::detail {

// Half-sample symmetric extension, reflecting repeatedly for signals shorter
// than the filter: ... x1 x0 | x0 x1 ... x(n-1) | x(n-1) x(n-2) ...
inline std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
    const auto period = static_cast<std::ptrdiff_t>(2 * n);
    i %= period;
    if (i < 0) i += period;
    const auto u = static_cast<std::size_t>(i);
    return u < n ? u : 2 * n - 1 - u;
}

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    const auto p = static_cast<std::ptrdiff_t>(n);
    i %= p;
    return static_cast<std::size_t>(i < 0 ? i + p : i);
}

// Symmetric:     lo[k] = sum_j dec.lo[j] * x(2k + 1 - j), mirrored indices.
// Periodization: lo[k] = sum_j dec.lo[j] * x((2k + F/2 - j) mod n'), with n'
//                the length padded to even by repeating the last sample.
// Same for hi. Matches PyWavelets' "symmetric" and "periodization" modes.
inline void analyze_line(const float* in, std::size_t in_stride, std::size_t n, FilterPair dec, Boundary b,
                         float* lo, float* hi, std::size_t out_stride) {
    const std::size_t f = dec.lo.size();
    const std::size_t m = dwt_coeff_len(n, f, b);
    const std::size_t padded = n + (n % 2);
    const auto shift = static_cast<std::ptrdiff_t>(b == Boundary::periodization ? f / 2 : 1);
    for (std::size_t k = 0; k < m; ++k) {
        double acc_lo = 0.0;
        double acc_hi = 0.0;
        for (std::size_t j = 0; j < f; ++j) {
            const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(2 * k) + shift - static_cast<std::ptrdiff_t>(j);
            std::size_t src = b == Boundary::periodization ? wrap(t, padded) : reflect(t, n);
            if (src >= n) src = n - 1;  // the repeated sample of an odd-length signal
            const double v = in[src * in_stride];
            acc_lo += dec.lo[j] * v;
            acc_hi += dec.hi[j] * v;
        }
        lo[k * out_stride] = static_cast<float>(acc_lo);
        hi[k * out_stride] = static_cast<float>(acc_hi);
    }
}

// Inverse of analyze_line, producing the first n samples. With periodization
// the transform is orthogonal on the padded signal, so this is its transpose.
inline void synthesize_line(const float* lo, const float* hi, std::size_t in_stride, std::size_t m, FilterPair dec,
                            Boundary b, std::size_t n, float* out, std::size_t out_stride) {
    const std::size_t f = dec.lo.size();
    if (b == Boundary::periodization) {
        const std::size_t padded = 2 * m;
        const auto shift = static_cast<std::ptrdiff_t>(f / 2);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < f; ++j) {
                // 2k = i - F/2 + j (mod n')
                const std::size_t r = wrap(static_cast<std::ptrdiff_t>(i + j) - shift, padded);
                if (r % 2 != 0) continue;
                const std::size_t ks = (r / 2) * in_stride;
                acc += dec.lo[j] * lo[ks] + dec.hi[j] * hi[ks];
            }
            out[i * out_stride] = static_cast<float>(acc);
        }
        return;
    }
    // x[i] = sum_k lo[k] * dec.lo[2k + 1 - i] + hi[k] * dec.hi[2k + 1 - i]
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        // 0 <= 2k + 1 - i < F  =>  (i - 1) / 2 <= k <= (i + F - 2) / 2
        const std::size_t k_begin = i == 0 ? 0 : i / 2;
        const std::size_t k_end = std::min(m, (i + f - 2) / 2 + 1);
        for (std::size_t k = k_begin; k < k_end; ++k) {
            const auto j = static_cast<std::ptrdiff_t>(2 * k + 1) - static_cast<std::ptrdiff_t>(i);
            if (j < 0 || j >= static_cast<std::ptrdiff_t>(f)) continue;
            const std::size_t ks = k * in_stride;
            acc += dec.lo[static_cast<std::size_t>(j)] * lo[ks] + dec.hi[static_cast<std::size_t>(j)] * hi[ks];
        }
        out[i * out_stride] = static_cast<float>(acc);
    }
}

inline void resample_line(const float* in, std::size_t in_stride, const ResampleTaps& taps,
                          float* out, std::size_t out_stride) {
    for (std::size_t i = 0; i < taps.out_len; ++i) {
        const std::int32_t* idx = taps.index.data() + i * taps.taps;
        const float* w = taps.weight.data() + i * taps.taps;
        double acc = 0.0;
        for (std::size_t k = 0; k < taps.taps; ++k) {
            acc += static_cast<double>(w[k]) * in[static_cast<std::size_t>(idx[k]) * in_stride];
        }
        out[i * out_stride] = static_cast<float>(acc);
    }
}

inline float mixture_value(float z, std::size_t j, std::span<const MixtureTerm> terms) {
    double acc = 0.0;
    for (const auto& t : terms) acc += t.a * z + t.b * t.mean[j];
    return static_cast<float>(acc);
}

inline void blend_row(float* acc, const float* patch, const float* weight, std::size_t n) {
    for (std::size_t x = 0; x < n; ++x) acc[x] += weight[x] * patch[x];
}

}  // namespace hiwave::kernels::detail
