// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cstddef>
#include <filesystem>

#include "hiwave/denoise.hpp"
#include "hiwave/field.hpp"
#include "hiwave/kernels.hpp"

namespace hiwave {

/// Pixel image with 1 or 3 channels and values clamped to [0, 1].
class ImageBuffer {
public:
    /// Clamps the values; throws ShapeError for other channel counts and
    /// NumericError for non-finite input.
    explicit ImageBuffer(Field pixels);
    ImageBuffer(std::size_t channels, std::size_t height, std::size_t width, float fill = 0.0f);

    const Field& pixels() const noexcept { return pixels_; }
    std::size_t channels() const noexcept { return pixels_.channels(); }
    std::size_t height() const noexcept { return pixels_.height(); }
    std::size_t width() const noexcept { return pixels_.width(); }

    bool operator==(const ImageBuffer&) const = default;

private:
    Field pixels_;
};

/// Separable Lanczos-a resize (rows, then columns), clamped to [0, 1].
ImageBuffer lanczos_resize(const ImageBuffer& img, std::size_t new_height, std::size_t new_width, int a = 3,
                           kernels::Exec exec = kernels::Exec::parallel);
/// Same resampler on an unclamped field.
Field lanczos_resize(const Field& f, std::size_t new_height, std::size_t new_width, int a = 3,
                     kernels::Exec exec = kernels::Exec::parallel);

Field encode_latent(const ImageBuffer& img, const Backend& backend);
ImageBuffer decode_latent(const Field& z, const Backend& backend);

/// Reads PNG (8 or 16 bit, gray/RGB, alpha dropped, palette expanded) or
/// binary PGM/PPM. Throws IoError when unreadable, FormatError when corrupt.
ImageBuffer load_image(const std::filesystem::path& path);
/// Writes 16-bit PNG, or 16-bit PGM/PPM when the extension is .pgm/.ppm.
void save_image(const ImageBuffer& img, const std::filesystem::path& path);

/// Peak signal-to-noise ratio in dB with peak 1; +inf for identical images.
double psnr(const ImageBuffer& a, const ImageBuffer& b);
double psnr(const Field& a, const Field& b, double peak = 1.0);

}  // namespace hiwave
