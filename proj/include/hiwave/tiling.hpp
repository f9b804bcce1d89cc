// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hiwave/field.hpp"
#include "hiwave/kernels.hpp"

namespace hiwave {

struct PatchOrigin {
    std::size_t y = 0;
    std::size_t x = 0;
    bool operator==(const PatchOrigin&) const = default;
};

/// Overlapping decomposition of a canvas into equally sized patches with a
/// stride of half the patch size. Each patch carries its own blend weights:
/// a separable Hann window divided pixelwise by the sum of all windows that
/// cover the pixel, so the weights of every canvas pixel sum to one.
class PatchLayout {
public:
    PatchLayout(std::size_t canvas_h, std::size_t canvas_w, std::size_t patch_h, std::size_t patch_w);

    std::size_t canvas_height() const noexcept { return canvas_h_; }
    std::size_t canvas_width() const noexcept { return canvas_w_; }
    std::size_t patch_height() const noexcept { return patch_h_; }
    std::size_t patch_width() const noexcept { return patch_w_; }
    std::size_t stride_y() const noexcept { return stride_y_; }
    std::size_t stride_x() const noexcept { return stride_x_; }
    std::size_t size() const noexcept { return origins_.size(); }

    const std::vector<std::size_t>& y_origins() const noexcept { return ys_; }
    const std::vector<std::size_t>& x_origins() const noexcept { return xs_; }
    /// Row-major: index = iy * x_origins().size() + ix.
    const PatchOrigin& origin(std::size_t index) const { return origins_.at(index); }
    const std::vector<PatchOrigin>& origins() const noexcept { return origins_; }
    /// patch_h x patch_w weights of patch `index`.
    std::span<const float> weight(std::size_t index) const;

private:
    std::size_t canvas_h_, canvas_w_, patch_h_, patch_w_, stride_y_, stride_x_;
    std::vector<std::size_t> ys_, xs_;
    std::vector<PatchOrigin> origins_;
    std::vector<float> weights_;
};

/// Origins along one axis: multiples of the stride, the last one clamped to
/// canvas - patch, without duplicates.
std::vector<std::size_t> axis_origins(std::size_t canvas, std::size_t patch, std::size_t stride);

/// Throws ConfigError when the patch does not fit in the canvas.
PatchLayout plan_layout(std::size_t canvas_h, std::size_t canvas_w, std::size_t patch_h, std::size_t patch_w);

/// Separable Hann window value sin^2(pi (i + 0.5) / n); never zero.
double hann(std::size_t i, std::size_t n);

Field extract(const Field& canvas, const PatchLayout& layout, std::size_t index);

/// acc += weight(index) * patch at the patch's position.
void accumulate(Field& acc, const PatchLayout& layout, std::size_t index, const Field& patch,
                kernels::Exec exec = kernels::Exec::parallel);

/// Blends one result per patch into a canvas, accumulating in index order.
Field blend(const PatchLayout& layout, std::span<const Field> patches, std::size_t channels);

/// Consecutive [begin, end) groups of at most `batch_size` patch indices.
std::vector<std::pair<std::size_t, std::size_t>> stream_batches(const PatchLayout& layout, std::size_t batch_size);

/// Debug dump: canvas, patch, stride, origins, and per-patch weight extrema.
nlohmann::json layout_to_json(const PatchLayout& layout);

}  // namespace hiwave
