// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hiwave {

struct Shape {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t size() const noexcept { return channels * height * width; }
    std::size_t plane() const noexcept { return height * width; }
    bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

/// Dense channel-major float field (C x H x W, row-major within a plane).
/// Carries images, latents, noise and denoiser predictions alike.
class Field {
public:
    /// Zero-filled field. Throws ShapeError for a zero dimension.
    explicit Field(Shape shape);
    Field(Shape shape, float fill);
    Field(Shape shape, std::vector<float> values);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t channels() const noexcept { return shape_.channels; }
    std::size_t height() const noexcept { return shape_.height; }
    std::size_t width() const noexcept { return shape_.width; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const float> values() const noexcept { return values_; }
    std::span<float> values() noexcept { return values_; }
    std::span<const float> channel(std::size_t c) const;
    std::span<float> channel(std::size_t c);

    float at(std::size_t c, std::size_t y, std::size_t x) const {
        return values_[(c * shape_.height + y) * shape_.width + x];
    }
    float& at(std::size_t c, std::size_t y, std::size_t x) {
        return values_[(c * shape_.height + y) * shape_.width + x];
    }

    bool operator==(const Field&) const = default;

private:
    Shape shape_;
    std::vector<float> values_;
};

/// Throws ShapeError naming both shapes when they differ.
void require_same_shape(const Shape& a, const Shape& b, const char* op);

/// Throws NumericError if any value is NaN or infinite.
void require_finite(const Field& f, const char* op);

/// a*x + y.
Field axpy(float a, const Field& x, const Field& y);

/// a*x + b*y, evaluated in double and rounded once.
Field lincomb(float a, const Field& x, float b, const Field& y);

Field scaled(const Field& x, float a);

float max_abs_diff(const Field& a, const Field& b);

/// Hex SHA-256 over the little-endian float payload and the shape.
std::string content_hash(const Field& f);

/// Binary format: "FLDF0001", u32 LE channels, height, width, then the
/// floats as little-endian IEEE-754.
void save_field(const Field& f, const std::filesystem::path& path);
Field load_field(const std::filesystem::path& path);

}  // namespace hiwave
