// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <unistd.h>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <omp.h>

#include "hiwave/errors.hpp"
#include "hiwave/rng.hpp"

namespace hiwave {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

[[noreturn]] void rethrow_located(std::exception_ptr err, std::size_t stage, std::size_t patch, int step) {
    try {
        std::rethrow_exception(err);
    } catch (const PipelineError&) {
        throw;
    } catch (const StepError& e) {
        std::throw_with_nested(PipelineError(e.inner(), static_cast<int>(stage), static_cast<int>(patch), e.step()));
    } catch (const std::exception& e) {
        std::throw_with_nested(PipelineError(e.what(), static_cast<int>(stage), static_cast<int>(patch), step));
    }
}

// Runs body(p) for every patch index in [begin, end) on up to (end - begin)
// threads, then rethrows the failure of the lowest patch index, if any.
template <typename Body>
void for_each_patch(std::size_t begin, std::size_t end, std::size_t stage, int step, Body&& body) {
    const auto count = static_cast<std::ptrdiff_t>(end - begin);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    const int threads = static_cast<int>(std::min<std::ptrdiff_t>(count, omp_get_max_threads()));
#pragma omp parallel for schedule(static, 1) num_threads(threads)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        try {
            body(begin + static_cast<std::size_t>(k));
        } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        if (errors[static_cast<std::size_t>(k)]) {
            rethrow_located(errors[static_cast<std::size_t>(k)], stage, begin + static_cast<std::size_t>(k), step);
        }
    }
}

std::size_t tau_for(double fraction, std::size_t steps) {
    return static_cast<std::size_t>(std::lround(std::clamp(fraction, 0.0, 1.0) * static_cast<double>(steps)));
}

// Temporary scratch directory removed on scope exit; a caller-provided
// directory is left in place.
class ScratchDir {
public:
    ScratchDir(const std::filesystem::path& requested, std::uint64_t seed) {
        if (!requested.empty()) {
            path_ = requested;
            return;
        }
        path_ = std::filesystem::temp_directory_path() / fmt::format("hiwave-{}-{}", ::getpid(), seed);
        owned_ = true;
    }
    ~ScratchDir() {
        if (!owned_) return;
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    bool owned_ = false;
};

double percentile98(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const auto k = static_cast<std::size_t>(std::floor(0.98 * static_cast<double>(v.size() - 1)));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

}  // namespace

std::vector<StageConfig> progressive_plan(std::size_t native, std::size_t stages, const StageConfig& prototype,
                                          std::vector<double> tau_fractions) {
    if (tau_fractions.empty()) tau_fractions.push_back(0.0);
    std::vector<StageConfig> plan;
    std::size_t size = native;
    for (std::size_t k = 0; k < stages; ++k) {
        size *= 2;
        StageConfig s = prototype;
        s.height = s.width = size;
        s.guidance.skip_tau_index = tau_for(tau_fractions[std::min(k, tau_fractions.size() - 1)], s.schedule.steps);
        plan.push_back(s);
    }
    return plan;
}

std::vector<StageConfig> one_shot_plan(std::size_t target, const StageConfig& prototype, double tau_fraction) {
    StageConfig s = prototype;
    s.height = s.width = target;
    s.guidance.skip_tau_index = tau_for(tau_fraction, s.schedule.steps);
    return {s};
}

ImageBuffer generate_base(const Backend& backend, const std::optional<std::string>& condition, std::uint64_t seed,
                          std::size_t channels, std::size_t height, std::size_t width, const ScheduleParams& schedule,
                          const GuidanceConfig& guidance) {
    if (auto image = backend.generate_base(condition.value_or(""), seed, height, width)) {
        return ImageBuffer(std::move(*image));
    }
    const auto sched = build_schedule(schedule);
    Rng rng(seed);
    const Field noise = gaussian_field(rng, backend.latent_shape(Shape{channels, height, width}));
    const Field z_T = scaled(noise, static_cast<float>(sched.sigma_max()));
    return decode_latent(ddim_sample(z_T, sched, backend, guidance, condition), backend);
}

Field sample_tiled(const Field& z_T, const PatchLayout& layout, const NoiseSchedule& schedule,
                   const GuidanceConfig& cfg, const Backend& backend, const std::vector<TrajectoryRecord>& inverted,
                   const StageContext& ctx, std::size_t batch_size) {
    if (!inverted.empty() && inverted.size() != layout.size()) {
        throw ConfigError(fmt::format("{} trajectories for {} patches", inverted.size(), layout.size()));
    }
    const auto sigmas = schedule.sigmas();
    const auto batches = stream_batches(layout, batch_size);
    Field z = z_T;
    for (std::size_t i = 0; i < schedule.step_count(); ++i) {
        Field acc(z.shape(), 0.0f);
        for (const auto& [begin, end] : batches) {
            std::vector<std::optional<Field>> results(end - begin);
            for_each_patch(begin, end, ctx.stage_index, static_cast<int>(i), [&](std::size_t p) {
                StepObserver obs;
                if (ctx.observer) {
                    obs = [&, p](std::size_t step, double sigma, const Field& c, const Field* u, const Field& g) {
                        ctx.observer(ctx.stage_index, p, step, sigma, c, u, g);
                    };
                }
                const TrajectoryRecord* rec = inverted.empty() ? nullptr : &inverted[p];
                results[p - begin] = sampling_step(backend, extract(z, layout, p), sigmas, i, cfg, ctx.condition, rec,
                                                   ctx.observer ? &obs : nullptr);
            });
            // Fixed accumulation order: results do not depend on batch size
            // or thread count.
            for (std::size_t p = begin; p < end; ++p) accumulate(acc, layout, p, *results[p - begin]);
        }
        z = std::move(acc);
    }
    return z;
}

ImageBuffer run_stage(const ImageBuffer& input, const StageConfig& stage, const Backend& backend,
                      const StageContext& ctx, StageReport* report) {
    const auto t0 = Clock::now();
    const auto where = static_cast<int>(ctx.stage_index);
    try {
        if (stage.height < input.height() || stage.width < input.width()) {
            throw ConfigError(fmt::format("stage target {}x{} is smaller than its input {}x{}", stage.height,
                                          stage.width, input.height(), input.width()));
        }
        const auto schedule = build_schedule(stage.schedule);
        const std::size_t steps = schedule.step_count();
        GuidanceConfig cfg = stage.guidance;
        if (!stage.invert) cfg.skip_tau_index = 0;
        cfg.validate(steps);

        const ImageBuffer upscaled = lanczos_resize(input, stage.height, stage.width);
        const Field z0 = encode_latent(upscaled, backend);
        const PatchLayout layout = plan_layout(z0.height(), z0.width(), stage.patch_height, stage.patch_width);
        const auto batches = stream_batches(layout, stage.batch_size);

        std::vector<TrajectoryRecord> inverted;
        bool spill = false;
        Field z_T(z0.shape());
        if (stage.invert) {
            InversionOptions opts;
            opts.guidance_w = stage.inversion_w;
            opts.retain_below = cfg.skip_tau_index;
            const std::size_t retained = std::min(cfg.skip_tau_index, steps) + 2;
            const std::size_t bytes = layout.size() * retained * z0.channels() * stage.patch_height *
                                      stage.patch_width * sizeof(float);
            spill = bytes > stage.trajectory_budget_bytes;
            inverted.resize(layout.size());
            for (const auto& [begin, end] : batches) {
                for_each_patch(begin, end, ctx.stage_index, -1, [&](std::size_t p) {
                    inverted[p] = ddim_invert(extract(z0, layout, p), schedule, backend, ctx.condition, opts);
                    if (spill) {
                        inverted[p].spill(ctx.work_dir / fmt::format("stage{}_patch{:04d}", ctx.stage_index, p));
                    }
                });
            }
            z_T = Field(z0.shape(), 0.0f);
            for (std::size_t p = 0; p < layout.size(); ++p) accumulate(z_T, layout, p, inverted[p].noise());
        } else {
            Rng rng(ctx.seed);
            z_T = scaled(gaussian_field(rng, z0.shape()), static_cast<float>(schedule.sigma_max()));
        }

        const Field z = sample_tiled(z_T, layout, schedule, cfg, backend, inverted, ctx, stage.batch_size);
        ImageBuffer out = decode_latent(z, backend);
        if (report) *report = StageReport{layout.size(), steps, spill, seconds_since(t0)};
        return out;
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        std::throw_with_nested(PipelineError(e.what(), where));
    }
}

RunResult run_pipeline(const PipelineConfig& config, const Backend& backend, std::size_t channels,
                       const std::filesystem::path& out_dir, const PatchStepObserver& observer) {
    const ScratchDir scratch(config.work_dir, config.seed);
    auto t0 = Clock::now();
    ImageBuffer base = generate_base(backend, config.condition, config.seed, channels, config.native_height,
                                     config.native_width, config.base_schedule, config.base_guidance);
    RunResult result{base, base, {}, backend.describe(), config, seconds_since(t0), {}, {}};

    ImageBuffer image = result.base;
    for (std::size_t k = 0; k < config.stages.size(); ++k) {
        StageContext ctx{config.condition, config.seed + k + 1, k, scratch.path(), observer};
        StageReport report;
        image = run_stage(image, config.stages[k], backend, ctx, &report);
        result.reports.push_back(report);
        result.stage_images.push_back(image);
    }
    result.image = image;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        result.outputs.push_back(out_dir / "base.png");
        save_image(result.base, result.outputs.back());
        for (std::size_t k = 0; k < result.stage_images.size(); ++k) {
            result.outputs.push_back(out_dir / fmt::format("stage_{}.png", k + 1));
            save_image(result.stage_images[k], result.outputs.back());
        }
        std::ofstream os(out_dir / "manifest.json");
        if (!os) throw IoError(fmt::format("cannot write manifest in '{}'", out_dir.string()));
        os << result.manifest_json().dump(2) << '\n';
    }
    return result;
}

nlohmann::json to_json(const ScheduleParams& p) {
    return {{"kind", to_string(p.kind)}, {"steps", p.steps}, {"sigma_min", p.sigma_min}, {"sigma_max", p.sigma_max}};
}

nlohmann::json to_json(const GuidanceConfig& g) {
    return {{"mode", to_string(g.mode)},
            {"w", g.w},
            {"w_d", g.w_d},
            {"wavelet", g.filter().name},
            {"boundary", to_string(g.boundary)},
            {"skip_tau_index", g.skip_tau_index},
            {"alpha", g.alpha},
            {"skip_orientation", to_string(g.skip_orientation)}};
}

nlohmann::json to_json(const StageConfig& s) {
    return {{"target", {s.height, s.width}},
            {"schedule", to_json(s.schedule)},
            {"guidance", to_json(s.guidance)},
            {"patch", {s.patch_height, s.patch_width}},
            {"batch_size", s.batch_size},
            {"invert", s.invert},
            {"inversion_w", s.inversion_w},
            {"trajectory_budget_bytes", s.trajectory_budget_bytes}};
}

std::string image_hash(const ImageBuffer& img) { return content_hash(img.pixels()); }

nlohmann::json RunResult::manifest_json() const {
    nlohmann::json stages = nlohmann::json::array();
    double total = base_seconds;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        nlohmann::json s = to_json(config.stages[k]);
        s["seconds"] = reports[k].seconds;
        s["patches"] = reports[k].patches;
        s["trajectories_spilled"] = reports[k].spilled;
        s["hash"] = image_hash(stage_images[k]);
        if (k + 1 < outputs.size()) s["path"] = outputs[k + 1].string();
        stages.push_back(s);
        total += reports[k].seconds;
    }
    nlohmann::json base_entry = {{"native", {config.native_height, config.native_width}},
                                 {"schedule", to_json(config.base_schedule)},
                                 {"guidance", to_json(config.base_guidance)},
                                 {"seconds", base_seconds},
                                 {"hash", image_hash(base)}};
    if (!outputs.empty()) base_entry["path"] = outputs.front().string();
    return {{"seed", config.seed},
            {"condition", config.condition ? nlohmann::json(*config.condition) : nlohmann::json(nullptr)},
            {"backend", backend},
            {"base", base_entry},
            {"stages", stages},
            {"final_hash", image_hash(image)},
            {"total_seconds", total}};
}

SeamStatistic seam_statistic(const ImageBuffer& img, const PatchLayout& layout) {
    if (img.height() != layout.canvas_height() || img.width() != layout.canvas_width()) {
        throw ShapeError("seam_statistic: image and layout sizes differ");
    }
    auto boundary_set = [](const std::vector<std::size_t>& origins, std::size_t patch, std::size_t extent) {
        std::vector<bool> on(extent + 1, false);
        for (auto o : origins) {
            if (o > 0) on[o] = true;
            if (o + patch < extent) on[o + patch] = true;
        }
        return on;
    };
    const auto rows = boundary_set(layout.y_origins(), layout.patch_height(), img.height());
    const auto cols = boundary_set(layout.x_origins(), layout.patch_width(), img.width());

    // A difference at position b spans the line between samples b-1 and b.
    std::vector<double> boundary, interior;
    const Field& f = img.pixels();
    for (std::size_t c = 0; c < img.channels(); ++c) {
        for (std::size_t y = 0; y < img.height(); ++y) {
            for (std::size_t x = 0; x < img.width(); ++x) {
                if (y > 0) (rows[y] ? boundary : interior).push_back(std::abs(f.at(c, y, x) - f.at(c, y - 1, x)));
                if (x > 0) (cols[x] ? boundary : interior).push_back(std::abs(f.at(c, y, x) - f.at(c, y, x - 1)));
            }
        }
    }
    return {percentile98(boundary), percentile98(interior)};
}

}  // namespace hiwave
