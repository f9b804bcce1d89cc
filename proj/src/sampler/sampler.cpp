// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/sampler.hpp"

#include <exception>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hiwave/errors.hpp"

namespace hiwave {

namespace {

std::string step_file(std::size_t i) { return fmt::format("step_{:04d}.fld", i); }

template <typename F>
auto with_step_context(std::size_t step, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        std::throw_with_nested(StepError(e.what(), static_cast<int>(step)));
    }
}

}  // namespace

TrajectoryRecord::TrajectoryRecord(std::vector<double> sigmas)
    : sigmas_(std::move(sigmas)), latents_(sigmas_.size()), on_disk_(sigmas_.size(), false) {}

bool TrajectoryRecord::has(std::size_t i) const {
    return i < latents_.size() && (latents_[i].has_value() || on_disk_[i]);
}

Field TrajectoryRecord::latent(std::size_t i) const {
    if (!has(i)) throw ConfigError(fmt::format("trajectory entry {} was not retained", i));
    if (latents_[i]) return *latents_[i];
    return load_field(spill_dir_ / step_file(i));
}

void TrajectoryRecord::set(std::size_t i, Field z) {
    if (i >= latents_.size()) throw ConfigError(fmt::format("trajectory index {} out of range", i));
    if (spilled()) {
        save_field(z, spill_dir_ / step_file(i));
        on_disk_[i] = true;
        return;
    }
    latents_[i] = std::move(z);
}

void TrajectoryRecord::spill(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < latents_.size(); ++i) {
        if (!latents_[i]) continue;
        save_field(*latents_[i], dir / step_file(i));
        latents_[i].reset();
        on_disk_[i] = true;
    }
    spill_dir_ = dir;
}

void save_trajectory(const TrajectoryRecord& rec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json files = nlohmann::json::object();
    for (std::size_t i = 0; i < rec.sigmas().size(); ++i) {
        if (!rec.has(i)) continue;
        save_field(rec.latent(i), dir / step_file(i));
        files[std::to_string(i)] = step_file(i);
    }
    const nlohmann::json manifest = {{"steps", rec.step_count()}, {"sigmas", rec.sigmas()}, {"files", files}};
    std::ofstream os(dir / "manifest.json");
    if (!os) throw IoError(fmt::format("cannot write trajectory manifest in '{}'", dir.string()));
    os << manifest.dump(2) << '\n';
}

TrajectoryRecord load_trajectory(const std::filesystem::path& dir) {
    std::ifstream is(dir / "manifest.json");
    if (!is) throw IoError(fmt::format("no trajectory manifest in '{}'", dir.string()));
    nlohmann::json manifest;
    try {
        is >> manifest;
        TrajectoryRecord rec(manifest.at("sigmas").get<std::vector<double>>());
        for (const auto& [key, name] : manifest.at("files").items()) {
            rec.set(std::stoul(key), load_field(dir / name.get<std::string>()));
        }
        return rec;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("malformed trajectory manifest in '{}': {}", dir.string(), e.what()));
    }
}

Field ddim_step(const Field& z, double sigma_from, double sigma_to, const Field& denoised) {
    if (sigma_from < 0.0 || sigma_to < 0.0) {
        throw ConfigError(fmt::format("ddim_step: negative sigma ({} -> {})", sigma_from, sigma_to));
    }
    require_same_shape(z.shape(), denoised.shape(), "ddim_step");
    if (sigma_from == 0.0) return denoised;
    if (sigma_to == sigma_from) return z;
    const double ratio = sigma_to / sigma_from;
    Field out(z.shape());
    auto zv = z.values();
    auto dv = denoised.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = static_cast<float>(dv[i] + ratio * (static_cast<double>(zv[i]) - dv[i]));
    require_finite(out, "ddim_step");
    return out;
}

Field guided_prediction(const Backend& backend, const Field& z, double sigma, const GuidanceConfig& cfg,
                        const std::optional<std::string>& condition, std::size_t step, const StepObserver* observer) {
    Field d_cond = denoise(backend, {z, sigma, condition});
    if (cfg.mode == GuidanceMode::conditional_only) {
        if (observer && *observer) (*observer)(step, sigma, d_cond, nullptr, d_cond);
        return d_cond;
    }
    const Field d_uncond = denoise(backend, {z, sigma, std::nullopt});
    Field guided = apply_guidance(d_cond, d_uncond, cfg);
    if (observer && *observer) (*observer)(step, sigma, d_cond, &d_uncond, guided);
    return guided;
}

Field sampling_step(const Backend& backend, const Field& z, std::span<const double> sigmas, std::size_t step,
                    const GuidanceConfig& cfg, const std::optional<std::string>& condition,
                    const TrajectoryRecord* inverted, const StepObserver* observer) {
    const std::size_t steps = sigmas.size() - 1;
    if (step >= steps) throw ConfigError(fmt::format("sampling step {} out of range for {} steps", step, steps));
    const bool mix = inverted != nullptr && step < cfg.skip_tau_index;
    const Field z_in = mix ? skip_residual_mix(z, inverted->latent(step), step, steps, cfg) : z;
    const Field d = guided_prediction(backend, z_in, sigmas[step], cfg, condition, step, observer);
    return ddim_step(z_in, sigmas[step], sigmas[step + 1], d);
}

Field ddim_sample(const Field& z_T, std::span<const double> sigmas, const Backend& backend, const GuidanceConfig& cfg,
                  const std::optional<std::string>& condition, const TrajectoryRecord* inverted,
                  const StepObserver* observer) {
    if (sigmas.empty()) throw ConfigError("ddim_sample: empty schedule");
    cfg.validate(sigmas.size() - 1);
    if (inverted && inverted->sigmas().size() != sigmas.size()) {
        throw ConfigError(fmt::format("ddim_sample: trajectory has {} levels, schedule has {}", inverted->sigmas().size(),
                                      sigmas.size()));
    }
    Field z = z_T;
    for (std::size_t i = 0; i + 1 < sigmas.size(); ++i) {
        z = with_step_context(i, [&] { return sampling_step(backend, z, sigmas, i, cfg, condition, inverted, observer); });
    }
    return z;
}

Field ddim_sample(const Field& z_T, const NoiseSchedule& schedule, const Backend& backend, const GuidanceConfig& cfg,
                  const std::optional<std::string>& condition, const TrajectoryRecord* inverted,
                  const StepObserver* observer) {
    return ddim_sample(z_T, schedule.sigmas(), backend, cfg, condition, inverted, observer);
}

TrajectoryRecord ddim_invert(const Field& x0, std::span<const double> sigmas, const Backend& backend,
                             const std::optional<std::string>& condition, const InversionOptions& opts) {
    if (sigmas.empty()) throw ConfigError("ddim_invert: empty schedule");
    require_finite(x0, "ddim_invert");
    TrajectoryRecord rec(std::vector<double>(sigmas.begin(), sigmas.end()));
    const std::size_t n = sigmas.size() - 1;
    rec.set(n, x0);

    GuidanceConfig cfg;
    cfg.mode = opts.guidance_w == 1.0 ? GuidanceMode::conditional_only : GuidanceMode::standard_cfg;
    cfg.w = opts.guidance_w;
    cfg.skip_tau_index = 0;
    cfg.validate();

    Field z = x0;
    for (std::size_t i = n; i-- > 0;) {
        z = with_step_context(n - 1 - i, [&] {
            const Field d = guided_prediction(backend, z, sigmas[i + 1], cfg, condition);
            return ddim_step(z, sigmas[i + 1], sigmas[i], d);
        });
        if (i == 0 || i < opts.retain_below) rec.set(i, z);
    }
    return rec;
}

TrajectoryRecord ddim_invert(const Field& x0, const NoiseSchedule& schedule, const Backend& backend,
                             const std::optional<std::string>& condition, const InversionOptions& opts) {
    return ddim_invert(x0, schedule.sigmas(), backend, condition, opts);
}

}  // namespace hiwave
