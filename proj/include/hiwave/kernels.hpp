// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

// Inner loops of the engine. Every kernel exists twice: `serial` is the plain
// reference used by the tests, `omp` distributes the same work over OpenMP
// threads. Parallel kernels never reorder a floating-point reduction, so their
// results do not depend on the thread count.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hiwave::kernels {

/// Which variant a public operation dispatches to.
enum class Exec { serial, parallel };

/// Analysis or synthesis filter pair (low-pass, high-pass).
struct FilterPair {
    std::span<const double> lo;
    std::span<const double> hi;
};

/// Precomputed taps of a 1-D resampling pass: output i reads
/// `index[i*taps + k]` with weight `weight[i*taps + k]`.
struct ResampleTaps {
    std::size_t in_len = 0;
    std::size_t out_len = 0;
    std::size_t taps = 0;
    std::vector<std::int32_t> index;
    std::vector<float> weight;
};

/// One mixture component's contribution to a posterior mean:
/// out += a * z + b * mean.
struct MixtureTerm {
    std::span<const float> mean;
    double a = 0.0;
    double b = 0.0;
};

/// Signal extension used by the wavelet kernels.
///   periodization: odd lengths are padded by repeating the last sample, then
///                  the signal is treated as periodic; ceil(n/2) coefficients
///                  per band, orthogonal for even n.
///   symmetric:     half-sample mirror extension; (n + F - 1)/2 coefficients
///                  per band (redundant for F > 2).
enum class Boundary { periodization, symmetric };

/// Coefficients per band produced from `n` samples by a filter of length
/// `filter_len`.
constexpr std::size_t dwt_coeff_len(std::size_t n, std::size_t filter_len, Boundary b) {
    return b == Boundary::periodization ? (n + 1) / 2 : (n + filter_len - 1) / 2;
}

#define HIWAVE_KERNEL_DECLS                                                                          \
    void lincomb(float a, std::span<const float> x, float b, std::span<const float> y,               \
                 std::span<float> out);                                                              \
    /* planes x h x w  ->  planes x h x m (m = dwt_coeff_len(w)) */                                  \
    void dwt_analyze_rows(std::span<const float> in, std::size_t planes, std::size_t h,              \
                          std::size_t w, FilterPair dec, Boundary b, std::span<float> lo,            \
                          std::span<float> hi);                                                      \
    /* planes x h x w  ->  planes x m x w */                                                         \
    void dwt_analyze_cols(std::span<const float> in, std::size_t planes, std::size_t h,              \
                          std::size_t w, FilterPair dec, Boundary b, std::span<float> lo,            \
                          std::span<float> hi);                                                      \
    /* planes x h x m  ->  planes x h x n; `dec` is the analysis pair, synthesis is its adjoint */    \
    void dwt_synthesize_rows(std::span<const float> lo, std::span<const float> hi,                   \
                             std::size_t planes, std::size_t h, std::size_t m, FilterPair dec,       \
                             Boundary b, std::size_t n, std::span<float> out);                       \
    /* planes x m x w  ->  planes x n x w */                                                         \
    void dwt_synthesize_cols(std::span<const float> lo, std::span<const float> hi,                   \
                             std::size_t planes, std::size_t m, std::size_t w, FilterPair dec,       \
                             Boundary b, std::size_t n, std::span<float> out);                       \
    void resample_rows(std::span<const float> in, std::size_t planes, std::size_t h,                 \
                       const ResampleTaps& taps, std::span<float> out);                              \
    void resample_cols(std::span<const float> in, std::size_t planes, std::size_t w,                 \
                       const ResampleTaps& taps, std::span<float> out);                              \
    double squared_distance(std::span<const float> a, std::span<const float> b);                     \
    void mixture_combine(std::span<const float> z, std::span<const MixtureTerm> terms,               \
                         std::span<float> out);                                                      \
    /* acc[c, y0+y, x0+x] += weight[y, x] * patch[c, y, x] */                                        \
    void blend_accumulate(std::span<float> acc, std::size_t channels, std::size_t canvas_h,          \
                          std::size_t canvas_w, std::span<const float> patch, std::size_t patch_h,   \
                          std::size_t patch_w, std::size_t y0, std::size_t x0,                       \
                          std::span<const float> weight);

namespace serial {
HIWAVE_KERNEL_DECLS
}

namespace omp {
HIWAVE_KERNEL_DECLS
}

#undef HIWAVE_KERNEL_DECLS

/// Partition size used by the parallel reductions.
inline constexpr std::size_t kReductionChunk = 4096;

/// Lanczos taps for resizing `in_len` samples to `out_len` with `a` lobes.
/// Pixel-centre alignment; the kernel is stretched by the scale factor when
/// downsampling; out-of-range taps clamp to the edge sample; weights are
/// normalised to sum to 1.
ResampleTaps lanczos_taps(std::size_t in_len, std::size_t out_len, int a);

/// sinc(x) * sinc(x / a) for |x| < a, else 0.
double lanczos_kernel(double x, int a);

}  // namespace hiwave::kernels
