// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hiwave/kernels.hpp"

namespace hiwave::kernels {

double lanczos_kernel(double x, int a) {
    const double ax = std::abs(x);
    if (ax < 1e-12) return 1.0;
    if (ax >= a) return 0.0;
    const double px = std::numbers::pi * x;
    return a * std::sin(px) * std::sin(px / a) / (px * px);
}

ResampleTaps lanczos_taps(std::size_t in_len, std::size_t out_len, int a) {
    ResampleTaps t;
    t.in_len = in_len;
    t.out_len = out_len;
    const double ratio = static_cast<double>(in_len) / static_cast<double>(out_len);
    const double filter_scale = std::max(1.0, ratio);
    const double support = a * filter_scale;
    t.taps = 2 * static_cast<std::size_t>(std::ceil(support)) + 1;
    t.index.resize(out_len * t.taps);
    t.weight.resize(out_len * t.taps);

    const auto last = static_cast<std::int64_t>(in_len) - 1;
    std::vector<double> w(t.taps);
    for (std::size_t i = 0; i < out_len; ++i) {
        const double center = (static_cast<double>(i) + 0.5) * ratio - 0.5;
        const auto first = static_cast<std::int64_t>(std::floor(center - support)) + 1;
        double sum = 0.0;
        for (std::size_t k = 0; k < t.taps; ++k) {
            const auto j = first + static_cast<std::int64_t>(k);
            w[k] = lanczos_kernel((static_cast<double>(j) - center) / filter_scale, a);
            sum += w[k];
            t.index[i * t.taps + k] = static_cast<std::int32_t>(std::clamp<std::int64_t>(j, 0, last));
        }
        for (std::size_t k = 0; k < t.taps; ++k) {
            t.weight[i * t.taps + k] = static_cast<float>(w[k] / sum);
        }
    }
    return t;
}

}  // namespace hiwave::kernels
