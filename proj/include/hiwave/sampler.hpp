// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hiwave/denoise.hpp"
#include "hiwave/field.hpp"
#include "hiwave/guidance.hpp"
#include "hiwave/schedule.hpp"

namespace hiwave {

/// Latents visited by an inversion, indexed like the schedule: entry i is the
/// latent at sigmas[i]. Entry N is the clean input, entry 0 the recovered
/// noise. Entries may be dropped (retention policy) or spilled to disk.
class TrajectoryRecord {
public:
    TrajectoryRecord() = default;
    explicit TrajectoryRecord(std::vector<double> sigmas);

    const std::vector<double>& sigmas() const noexcept { return sigmas_; }
    std::size_t step_count() const noexcept { return sigmas_.empty() ? 0 : sigmas_.size() - 1; }

    bool has(std::size_t i) const;
    /// Throws ConfigError for an index that was not retained.
    Field latent(std::size_t i) const;
    Field noise() const { return latent(0); }
    void set(std::size_t i, Field z);

    /// Writes every retained latent to `dir` and releases the memory; later
    /// reads come from disk.
    void spill(const std::filesystem::path& dir);
    bool spilled() const noexcept { return !spill_dir_.empty(); }

private:
    std::vector<double> sigmas_;
    std::vector<std::optional<Field>> latents_;
    std::vector<bool> on_disk_;
    std::filesystem::path spill_dir_;
};

/// Archive layout: one step_NNNN.fld per retained entry plus manifest.json
/// with {"steps", "sigmas", "files": {index: filename}}.
void save_trajectory(const TrajectoryRecord& rec, const std::filesystem::path& dir);
TrajectoryRecord load_trajectory(const std::filesystem::path& dir);

/// One Euler step of the probability-flow ODE in sigma:
/// z' = denoised + (sigma_to / sigma_from) * (z - denoised). Works in either
/// direction; sigma_from == 0 returns `denoised`.
Field ddim_step(const Field& z, double sigma_from, double sigma_to, const Field& denoised);

/// Hook called once per sampling step with the raw and guided predictions.
/// `d_uncond` is null when the mode needed no unconditional call.
using StepObserver = std::function<void(std::size_t step, double sigma, const Field& d_cond, const Field* d_uncond,
                                        const Field& guided)>;

/// Guided prediction at one noise level (one or two backend calls
/// depending on cfg.mode).
Field guided_prediction(const Backend& backend, const Field& z, double sigma, const GuidanceConfig& cfg,
                        const std::optional<std::string>& condition, std::size_t step = 0,
                        const StepObserver* observer = nullptr);

/// Step `step` of reverse sampling: optional skip residual against
/// `inverted`, guided prediction at sigmas[step], Euler step to sigmas[step+1].
Field sampling_step(const Backend& backend, const Field& z, std::span<const double> sigmas, std::size_t step,
                    const GuidanceConfig& cfg, const std::optional<std::string>& condition,
                    const TrajectoryRecord* inverted = nullptr, const StepObserver* observer = nullptr);

/// Reverse DDIM sampling from z_T at sigmas.front() down to 0.
Field ddim_sample(const Field& z_T, std::span<const double> sigmas, const Backend& backend, const GuidanceConfig& cfg,
                  const std::optional<std::string>& condition, const TrajectoryRecord* inverted = nullptr,
                  const StepObserver* observer = nullptr);
Field ddim_sample(const Field& z_T, const NoiseSchedule& schedule, const Backend& backend, const GuidanceConfig& cfg,
                  const std::optional<std::string>& condition, const TrajectoryRecord* inverted = nullptr,
                  const StepObserver* observer = nullptr);

struct InversionOptions {
    /// Guidance strength during inversion; 1 means conditional prediction only.
    double guidance_w = 1.0;
    /// Keep latents with index < retain_below (plus the endpoints 0 and N).
    std::size_t retain_below = std::numeric_limits<std::size_t>::max();
};

/// Forward DDIM inversion: integrates the same Euler step with the schedule
/// reversed, recording the latent at every noise level.
TrajectoryRecord ddim_invert(const Field& x0, std::span<const double> sigmas, const Backend& backend,
                             const std::optional<std::string>& condition, const InversionOptions& opts = {});
TrajectoryRecord ddim_invert(const Field& x0, const NoiseSchedule& schedule, const Backend& backend,
                             const std::optional<std::string>& condition, const InversionOptions& opts = {});

}  // namespace hiwave
