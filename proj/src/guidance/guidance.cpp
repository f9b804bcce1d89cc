// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/guidance.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "hiwave/errors.hpp"

namespace hiwave {

GuidanceMode guidance_mode_from_string(std::string_view s) {
    if (s == "frequency_guided") return GuidanceMode::frequency_guided;
    if (s == "standard_cfg") return GuidanceMode::standard_cfg;
    if (s == "low_band_only") return GuidanceMode::low_band_only;
    if (s == "conditional_only") return GuidanceMode::conditional_only;
    throw ConfigError(fmt::format("unknown guidance mode '{}'", s));
}

std::string_view to_string(GuidanceMode m) {
    switch (m) {
        case GuidanceMode::frequency_guided: return "frequency_guided";
        case GuidanceMode::standard_cfg: return "standard_cfg";
        case GuidanceMode::low_band_only: return "low_band_only";
        case GuidanceMode::conditional_only: return "conditional_only";
    }
    return "?";
}

SkipOrientation skip_orientation_from_string(std::string_view s) {
    if (s == "prose") return SkipOrientation::prose;
    if (s == "literal") return SkipOrientation::literal;
    throw ConfigError(fmt::format("unknown skip orientation '{}' (expected prose or literal)", s));
}

std::string_view to_string(SkipOrientation o) { return o == SkipOrientation::prose ? "prose" : "literal"; }

const WaveletFilter& GuidanceConfig::filter() const {
    return wavelet == WaveletKind::haar ? WaveletFilter::haar() : WaveletFilter::sym4();
}

void GuidanceConfig::validate() const {
    if (!(w >= 0.0)) throw ConfigError(fmt::format("guidance w must be >= 0, got {}", w));
    if (!(w_d >= 0.0)) throw ConfigError(fmt::format("guidance w_d must be >= 0, got {}", w_d));
    if (!(alpha > 0.0)) throw ConfigError(fmt::format("skip alpha must be > 0, got {}", alpha));
}

void GuidanceConfig::validate(std::size_t steps) const {
    validate();
    if (skip_tau_index > steps) {
        throw ConfigError(fmt::format("skip tau {} exceeds step count {}", skip_tau_index, steps));
    }
}

Field cfg_standard(const Field& d_cond, const Field& d_uncond, double w) {
    require_same_shape(d_cond.shape(), d_uncond.shape(), "cfg_standard");
    Field out(d_cond.shape());
    auto c = d_cond.values();
    auto u = d_uncond.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = static_cast<float>(u[i] + w * (static_cast<double>(c[i]) - u[i]));
    }
    require_finite(out, "cfg_standard");
    return out;
}

namespace {

// u + s * (c - u), bandwise.
Field guide_band(const Field& c, const Field& u, double s) { return cfg_standard(c, u, s); }

}  // namespace

Field cfg_frequency_guided(const Field& d_cond, const Field& d_uncond, const GuidanceConfig& cfg) {
    require_same_shape(d_cond.shape(), d_uncond.shape(), "cfg_frequency_guided");
    const auto& filter = cfg.filter();
    WaveletBands bc = dwt2(d_cond, filter, cfg.boundary);
    const WaveletBands bu = dwt2(d_uncond, filter, cfg.boundary);
    bc.horizontal = guide_band(bc.horizontal, bu.horizontal, cfg.w_d);
    bc.vertical = guide_band(bc.vertical, bu.vertical, cfg.w_d);
    bc.diagonal = guide_band(bc.diagonal, bu.diagonal, cfg.w_d);
    return idwt2(bc, filter);
}

Field low_band_only_guidance(const Field& d_cond, const Field& d_uncond, const GuidanceConfig& cfg) {
    require_same_shape(d_cond.shape(), d_uncond.shape(), "low_band_only_guidance");
    const auto& filter = cfg.filter();
    WaveletBands bc = dwt2(d_cond, filter, cfg.boundary);
    const WaveletBands bu = dwt2(d_uncond, filter, cfg.boundary);
    bc.low = guide_band(bc.low, bu.low, cfg.w_d);
    return idwt2(bc, filter);
}

Field apply_guidance(const Field& d_cond, const Field& d_uncond, const GuidanceConfig& cfg) {
    switch (cfg.mode) {
        case GuidanceMode::frequency_guided: return cfg_frequency_guided(d_cond, d_uncond, cfg);
        case GuidanceMode::standard_cfg: return cfg_standard(d_cond, d_uncond, cfg.w);
        case GuidanceMode::low_band_only: return low_band_only_guidance(d_cond, d_uncond, cfg);
        case GuidanceMode::conditional_only:
            require_same_shape(d_cond.shape(), d_uncond.shape(), "apply_guidance");
            return d_cond;
    }
    throw ConfigError("unhandled guidance mode");
}

double skip_weight(std::size_t step, std::size_t steps, double alpha) {
    const double u = static_cast<double>(step) / static_cast<double>(steps);
    return std::pow((1.0 + std::cos(std::numbers::pi * u)) / 2.0, alpha);
}

Field skip_residual_mix(const Field& z_current, const Field& z_inverted, std::size_t step, std::size_t steps,
                        const GuidanceConfig& cfg) {
    require_same_shape(z_current.shape(), z_inverted.shape(), "skip_residual_mix");
    if (steps == 0 || step >= steps) {
        throw ConfigError(fmt::format("skip_residual_mix: step {} out of range for {} steps", step, steps));
    }
    if (step >= cfg.skip_tau_index) return z_current;

    const double c1 = skip_weight(step, steps, cfg.alpha);
    const double w_inv = cfg.skip_orientation == SkipOrientation::prose ? c1 : 1.0 - c1;
    const double w_cur = 1.0 - w_inv;
    Field out(z_current.shape());
    auto cur = z_current.values();
    auto inv = z_inverted.values();
    auto o = out.values();
    // Evaluated in double and rounded once, so the result stays inside the
    // envelope of the two inputs.
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = static_cast<float>(w_inv * inv[i] + w_cur * cur[i]);
    return out;
}

}  // namespace hiwave
