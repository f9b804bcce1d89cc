// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hiwave/errors.hpp"

namespace hiwave {

double hann(std::size_t i, std::size_t n) {
    const double s = std::sin(std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
    return s * s;
}

std::vector<std::size_t> axis_origins(std::size_t canvas, std::size_t patch, std::size_t stride) {
    std::vector<std::size_t> out;
    for (std::size_t o = 0;; o += stride) {
        const std::size_t clamped = std::min(o, canvas - patch);
        if (out.empty() || out.back() != clamped) out.push_back(clamped);
        if (clamped + patch >= canvas) break;
    }
    return out;
}

PatchLayout::PatchLayout(std::size_t canvas_h, std::size_t canvas_w, std::size_t patch_h, std::size_t patch_w)
    : canvas_h_(canvas_h),
      canvas_w_(canvas_w),
      patch_h_(patch_h),
      patch_w_(patch_w),
      stride_y_(std::max<std::size_t>(1, patch_h / 2)),
      stride_x_(std::max<std::size_t>(1, patch_w / 2)) {
    if (patch_h == 0 || patch_w == 0 || patch_h > canvas_h || patch_w > canvas_w) {
        throw ConfigError(fmt::format("patch {}x{} does not fit canvas {}x{}", patch_h, patch_w, canvas_h, canvas_w));
    }
    ys_ = axis_origins(canvas_h, patch_h, stride_y_);
    xs_ = axis_origins(canvas_w, patch_w, stride_x_);
    for (auto y : ys_) {
        for (auto x : xs_) origins_.push_back({y, x});
    }

    std::vector<double> wy(patch_h), wx(patch_w);
    for (std::size_t i = 0; i < patch_h; ++i) wy[i] = hann(i, patch_h);
    for (std::size_t i = 0; i < patch_w; ++i) wx[i] = hann(i, patch_w);

    std::vector<double> total(canvas_h * canvas_w, 0.0);
    for (const auto& o : origins_) {
        for (std::size_t y = 0; y < patch_h; ++y) {
            double* row = total.data() + (o.y + y) * canvas_w + o.x;
            for (std::size_t x = 0; x < patch_w; ++x) row[x] += wy[y] * wx[x];
        }
    }
    const std::size_t plane = patch_h * patch_w;
    weights_.resize(origins_.size() * plane);
    for (std::size_t p = 0; p < origins_.size(); ++p) {
        const auto& o = origins_[p];
        float* w = weights_.data() + p * plane;
        for (std::size_t y = 0; y < patch_h; ++y) {
            const double* row = total.data() + (o.y + y) * canvas_w + o.x;
            for (std::size_t x = 0; x < patch_w; ++x) {
                w[y * patch_w + x] = static_cast<float>(wy[y] * wx[x] / row[x]);
            }
        }
    }
}

std::span<const float> PatchLayout::weight(std::size_t index) const {
    if (index >= origins_.size()) throw ConfigError(fmt::format("patch index {} out of range", index));
    const std::size_t plane = patch_h_ * patch_w_;
    return std::span<const float>(weights_).subspan(index * plane, plane);
}

PatchLayout plan_layout(std::size_t canvas_h, std::size_t canvas_w, std::size_t patch_h, std::size_t patch_w) {
    return PatchLayout(canvas_h, canvas_w, patch_h, patch_w);
}

Field extract(const Field& canvas, const PatchLayout& layout, std::size_t index) {
    if (canvas.height() != layout.canvas_height() || canvas.width() != layout.canvas_width()) {
        throw ShapeError(fmt::format("extract: canvas {} does not match layout {}x{}", to_string(canvas.shape()),
                                     layout.canvas_height(), layout.canvas_width()));
    }
    const auto& o = layout.origin(index);
    const std::size_t ph = layout.patch_height();
    const std::size_t pw = layout.patch_width();
    Field out(Shape{canvas.channels(), ph, pw});
    for (std::size_t c = 0; c < canvas.channels(); ++c) {
        for (std::size_t y = 0; y < ph; ++y) {
            const float* src = canvas.values().data() + (c * canvas.height() + o.y + y) * canvas.width() + o.x;
            std::copy(src, src + pw, &out.at(c, y, 0));
        }
    }
    return out;
}

void accumulate(Field& acc, const PatchLayout& layout, std::size_t index, const Field& patch, kernels::Exec exec) {
    const Shape want{acc.channels(), layout.patch_height(), layout.patch_width()};
    require_same_shape(want, patch.shape(), "accumulate");
    if (acc.height() != layout.canvas_height() || acc.width() != layout.canvas_width()) {
        throw ShapeError(fmt::format("accumulate: canvas {} does not match layout {}x{}", to_string(acc.shape()),
                                     layout.canvas_height(), layout.canvas_width()));
    }
    const auto& o = layout.origin(index);
    auto* fn = exec == kernels::Exec::serial ? &kernels::serial::blend_accumulate : &kernels::omp::blend_accumulate;
    fn(acc.values(), acc.channels(), acc.height(), acc.width(), patch.values(), want.height, want.width, o.y, o.x,
       layout.weight(index));
}

Field blend(const PatchLayout& layout, std::span<const Field> patches, std::size_t channels) {
    if (patches.size() != layout.size()) {
        throw ConfigError(fmt::format("blend: {} patches for a layout of {}", patches.size(), layout.size()));
    }
    Field acc(Shape{channels, layout.canvas_height(), layout.canvas_width()}, 0.0f);
    for (std::size_t i = 0; i < patches.size(); ++i) accumulate(acc, layout, i, patches[i]);
    return acc;
}

std::vector<std::pair<std::size_t, std::size_t>> stream_batches(const PatchLayout& layout, std::size_t batch_size) {
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t b = 0; b < layout.size(); b += batch_size) out.emplace_back(b, std::min(layout.size(), b + batch_size));
    return out;
}

nlohmann::json layout_to_json(const PatchLayout& layout) {
    nlohmann::json patches = nlohmann::json::array();
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const auto w = layout.weight(i);
        const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
        patches.push_back({{"index", i},
                           {"y", layout.origin(i).y},
                           {"x", layout.origin(i).x},
                           {"weight_min", *lo},
                           {"weight_max", *hi}});
    }
    return {{"canvas", {layout.canvas_height(), layout.canvas_width()}},
            {"patch", {layout.patch_height(), layout.patch_width()}},
            {"stride", {layout.stride_y(), layout.stride_x()}},
            {"y_origins", layout.y_origins()},
            {"x_origins", layout.x_origins()},
            {"patches", patches}};
}

}  // namespace hiwave
