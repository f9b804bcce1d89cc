// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cstddef>
#include <string_view>

#include "hiwave/field.hpp"
#include "hiwave/wavelet.hpp"

namespace hiwave {

enum class GuidanceMode {
    frequency_guided,  // low band from the conditional prediction, detail bands guided with w_d
    standard_cfg,      // plain classifier-free guidance with w
    low_band_only,     // the inverse arm: low band guided with w_d, detail bands conditional
    conditional_only,  // no guidance, conditional prediction only
};

/// Which way the skip-residual weights point.
///   prose:   early steps are dominated by the inverted latent.
///   literal: the two weights swapped.
enum class SkipOrientation { prose, literal };

GuidanceMode guidance_mode_from_string(std::string_view s);
std::string_view to_string(GuidanceMode m);
SkipOrientation skip_orientation_from_string(std::string_view s);
std::string_view to_string(SkipOrientation o);

struct GuidanceConfig {
    double w = 7.5;
    double w_d = 7.5;
    WaveletKind wavelet = WaveletKind::sym4;
    Boundary boundary = Boundary::periodization;
    GuidanceMode mode = GuidanceMode::frequency_guided;
    std::size_t skip_tau_index = 0;  // skip residuals apply while step index < this
    double alpha = 3.0;
    SkipOrientation skip_orientation = SkipOrientation::prose;

    const WaveletFilter& filter() const;
    /// Throws ConfigError for negative strengths or alpha <= 0.
    void validate() const;
    /// Also checks skip_tau_index <= steps.
    void validate(std::size_t steps) const;
};

/// d_uncond + w * (d_cond - d_uncond).
Field cfg_standard(const Field& d_cond, const Field& d_uncond, double w);

/// Detail enhancer: per channel, DWT both predictions, keep the conditional
/// low band, guide H/V/D with w_d, inverse DWT.
Field cfg_frequency_guided(const Field& d_cond, const Field& d_uncond, const GuidanceConfig& cfg);

/// Low band guided with w_d, H/V/D taken from the conditional prediction.
Field low_band_only_guidance(const Field& d_cond, const Field& d_uncond, const GuidanceConfig& cfg);

/// Dispatch on cfg.mode.
Field apply_guidance(const Field& d_cond, const Field& d_uncond, const GuidanceConfig& cfg);

/// Cosine-decay weight ((1 + cos(pi * i / n)) / 2)^alpha.
double skip_weight(std::size_t step, std::size_t steps, double alpha);

/// Skip residual at step `step` of `steps`. Returns z_current unchanged when
/// step >= cfg.skip_tau_index; otherwise a convex mix of the two latents with
/// weight skip_weight() on z_inverted (prose) or on z_current (literal).
Field skip_residual_mix(const Field& z_current, const Field& z_inverted, std::size_t step, std::size_t steps,
                        const GuidanceConfig& cfg);

}  // namespace hiwave
