// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hiwave/denoise.hpp"
#include "hiwave/guidance.hpp"
#include "hiwave/imaging.hpp"
#include "hiwave/sampler.hpp"
#include "hiwave/schedule.hpp"
#include "hiwave/tiling.hpp"

namespace hiwave {

/// One detail pass: upscale to (height, width), invert every patch, then
/// resample the blended canvas with guidance and skip residuals.
struct StageConfig {
    std::size_t height = 0;
    std::size_t width = 0;
    ScheduleParams schedule;
    GuidanceConfig guidance;
    std::size_t patch_height = 64;
    std::size_t patch_width = 64;
    std::size_t batch_size = 4;
    /// false: the "no inversion" arm. Patches start from Gaussian noise at
    /// sigma_max and skip residuals are off.
    bool invert = true;
    double inversion_w = 1.0;
    /// Inversion trajectories move to disk when they would exceed this.
    std::size_t trajectory_budget_bytes = std::size_t{256} << 20;
};

struct PipelineConfig {
    std::optional<std::string> condition;
    std::uint64_t seed = 0;
    std::size_t native_height = 64;
    std::size_t native_width = 64;
    ScheduleParams base_schedule;
    /// Guidance used for the base image (standard CFG by default).
    GuidanceConfig base_guidance = [] {
        GuidanceConfig g;
        g.mode = GuidanceMode::standard_cfg;
        return g;
    }();
    std::vector<StageConfig> stages;
    /// Scratch space for spilled trajectories; a temporary directory when empty.
    std::filesystem::path work_dir;
};

/// Observer for one sampling step of one patch.
using PatchStepObserver = std::function<void(std::size_t stage, std::size_t patch, std::size_t step, double sigma,
                                             const Field& d_cond, const Field* d_uncond, const Field& guided)>;

/// Per-run values a stage needs beyond its config.
struct StageContext {
    std::optional<std::string> condition;
    std::uint64_t seed = 0;
    std::size_t stage_index = 0;
    std::filesystem::path work_dir;
    PatchStepObserver observer;
};

/// Progressive plan doubling `native` `stages` times, with tau at
/// `tau_fractions[k]` of the step count for stage k (default 15/50, 30/50,
/// and the last value repeated).
std::vector<StageConfig> progressive_plan(std::size_t native, std::size_t stages, const StageConfig& prototype,
                                          std::vector<double> tau_fractions = {0.3, 0.6});
/// Single stage straight to `target`.
std::vector<StageConfig> one_shot_plan(std::size_t target, const StageConfig& prototype, double tau_fraction = 0.3);

/// Base image at native resolution. Delegates to the backend when it can
/// generate on its own; otherwise samples from sigma_max noise seeded by `seed`.
ImageBuffer generate_base(const Backend& backend, const std::optional<std::string>& condition, std::uint64_t seed,
                          std::size_t channels, std::size_t height, std::size_t width, const ScheduleParams& schedule,
                          const GuidanceConfig& guidance);

struct StageReport {
    std::size_t patches = 0;
    std::size_t steps = 0;
    bool spilled = false;
    double seconds = 0.0;
};

/// Runs one detail pass on `input`. Failures are rethrown as PipelineError
/// with the stage, patch and step attached.
ImageBuffer run_stage(const ImageBuffer& input, const StageConfig& stage, const Backend& backend,
                      const StageContext& ctx, StageReport* report = nullptr);

/// Tiled guided sampling of a latent canvas, the core of run_stage.
/// `inverted` holds one trajectory per patch (empty for the no-inversion arm).
Field sample_tiled(const Field& z_T, const PatchLayout& layout, const NoiseSchedule& schedule,
                   const GuidanceConfig& cfg, const Backend& backend, const std::vector<TrajectoryRecord>& inverted,
                   const StageContext& ctx, std::size_t batch_size);

struct RunResult {
    ImageBuffer base;
    ImageBuffer image;
    std::vector<ImageBuffer> stage_images;
    std::string backend;
    PipelineConfig config;
    double base_seconds = 0.0;
    std::vector<StageReport> reports;
    std::vector<std::filesystem::path> outputs;

    nlohmann::json manifest_json() const;
};

/// Base generation followed by every stage in order. When `out_dir` is set,
/// writes base.png, stage_K.png and manifest.json there.
RunResult run_pipeline(const PipelineConfig& config, const Backend& backend, std::size_t channels,
                       const std::filesystem::path& out_dir = {}, const PatchStepObserver& observer = {});

/// Serialization of configs for the manifest.
nlohmann::json to_json(const StageConfig& s);
nlohmann::json to_json(const GuidanceConfig& g);
nlohmann::json to_json(const ScheduleParams& p);

/// Content hash of an image's pixel field.
std::string image_hash(const ImageBuffer& img);

/// Seam statistic of an image tiled by `layout` (in pixel coordinates):
/// the 98th percentile of |finite difference| across patch boundary lines,
/// and the same over all other lines.
struct SeamStatistic {
    double boundary = 0.0;
    double interior = 0.0;
    double ratio() const { return interior > 0.0 ? boundary / interior : 0.0; }
};
SeamStatistic seam_statistic(const ImageBuffer& img, const PatchLayout& layout);

}  // namespace hiwave
