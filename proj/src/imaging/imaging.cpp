// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hiwave/errors.hpp"

namespace hiwave {

namespace {

Field clamped(Field f) {
    require_finite(f, "image");
    for (auto& v : f.values()) v = std::clamp(v, 0.0f, 1.0f);
    return f;
}

}  // namespace

ImageBuffer::ImageBuffer(Field pixels) : pixels_(clamped(std::move(pixels))) {
    if (pixels_.channels() != 1 && pixels_.channels() != 3) {
        throw ShapeError(fmt::format("images have 1 or 3 channels, got {}", pixels_.channels()));
    }
}

ImageBuffer::ImageBuffer(std::size_t channels, std::size_t height, std::size_t width, float fill)
    : ImageBuffer(Field(Shape{channels, height, width}, fill)) {}

Field lanczos_resize(const Field& f, std::size_t new_height, std::size_t new_width, int a, kernels::Exec exec) {
    if (new_height == 0 || new_width == 0) throw ShapeError("lanczos_resize: target size must be positive");
    if (a < 1) throw ConfigError("lanczos_resize: need at least one lobe");
    const bool serial = exec == kernels::Exec::serial;
    const std::size_t c = f.channels();

    // Rows: c x h x w -> c x h x new_w
    const auto row_taps = kernels::lanczos_taps(f.width(), new_width, a);
    Field tmp(Shape{c, f.height(), new_width});
    (serial ? kernels::serial::resample_rows : kernels::omp::resample_rows)(f.values(), c, f.height(), row_taps,
                                                                            tmp.values());
    // Columns: c x h x new_w -> c x new_h x new_w
    const auto col_taps = kernels::lanczos_taps(f.height(), new_height, a);
    Field out(Shape{c, new_height, new_width});
    (serial ? kernels::serial::resample_cols : kernels::omp::resample_cols)(tmp.values(), c, new_width, col_taps,
                                                                            out.values());
    return out;
}

ImageBuffer lanczos_resize(const ImageBuffer& img, std::size_t new_height, std::size_t new_width, int a,
                           kernels::Exec exec) {
    return ImageBuffer(lanczos_resize(img.pixels(), new_height, new_width, a, exec));
}

Field encode_latent(const ImageBuffer& img, const Backend& backend) { return backend.encode(img.pixels()); }

ImageBuffer decode_latent(const Field& z, const Backend& backend) { return ImageBuffer(backend.decode(z)); }

double psnr(const Field& a, const Field& b, double peak) {
    require_same_shape(a.shape(), b.shape(), "psnr");
    const double mse = kernels::omp::squared_distance(a.values(), b.values()) / static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) { return psnr(a.pixels(), b.pixels(), 1.0); }

}  // namespace hiwave
