// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Everything runs on the analytic backend.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <omp.h>

#include "hiwave/denoise.hpp"
#include "hiwave/guidance.hpp"
#include "hiwave/pipeline.hpp"
#include "hiwave/rng.hpp"
#include "hiwave/sampler.hpp"
#include "hiwave/schedule.hpp"
#include "hiwave/tiling.hpp"
#include "hiwave/wavelet.hpp"

using namespace hiwave;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Field noise_field(Shape shape, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    Field f = gaussian_field(rng, shape);
    for (auto& v : f.values()) v = static_cast<float>(v * scale);
    return f;
}

double max_err(const Field& a, const Field& b) { return static_cast<double>(max_abs_diff(a, b)); }

constexpr std::size_t kChannels = 3;
constexpr std::size_t kNative = 64;

AnalyticBackend default_backend() {
    const ProceduralModel m;
    return AnalyticBackend(GaussianMixture::procedural(Shape{kChannels, kNative, kNative}, m.components, m.stddev, m.seed));
}

GuidanceConfig conditional_only() {
    GuidanceConfig g;
    g.mode = GuidanceMode::conditional_only;
    return g;
}

PipelineConfig desk_config() {
    PipelineConfig cfg;
    cfg.condition = "0";
    cfg.seed = 2024;
    cfg.native_height = cfg.native_width = kNative;
    cfg.stages = progressive_plan(kNative, 2, StageConfig{});
    return cfg;
}

Outcome wavelet_reconstruction() {
    std::vector<Field> fields;
    for (std::size_t n = 2; n <= 257; ++n) {
        for (std::size_t w : {n, n + 1 + n % 3}) fields.push_back(noise_field(Shape{1, n, w}, n * 1000 + w));
    }
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t cases = 0;
    for (const auto* filter : {&WaveletFilter::haar(), &WaveletFilter::sym4()}) {
        for (auto boundary : {Boundary::periodization, Boundary::symmetric}) {
            for (const Field& x : fields) {
                worst = std::max(worst, max_err(idwt2(dwt2(x, *filter, boundary), *filter), x));
                ++cases;
            }
        }
    }
    const double t = seconds_since(t0);
    return {worst < 1e-5 && t < 5.0, fmt::format("{} fields, max error {:.2e}, {:.2f} s", cases, worst, t)};
}

Outcome guidance_identities() {
    double identity = 0.0, low = 0.0;
    bool bitwise = true;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Shape shape{kChannels, 32 * seed, 48};
        const Field c = noise_field(shape, seed), u = noise_field(shape, seed + 100);
        for (auto kind : {WaveletKind::sym4, WaveletKind::haar}) {
            GuidanceConfig g;
            g.wavelet = kind;
            g.w_d = 1.0;
            identity = std::max(identity, max_err(cfg_frequency_guided(c, u, g), c));
            for (double wd : {0.0, 1.0, 7.5}) {
                g.w_d = wd;
                const auto& f = g.filter();
                low = std::max(low, max_err(dwt2(cfg_frequency_guided(c, u, g), f).low, dwt2(c, f).low));
            }
        }
        GuidanceConfig s;
        s.mode = GuidanceMode::standard_cfg;
        const Field out = apply_guidance(c, u, s);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double uu = u.values()[i];
            bitwise &= out.values()[i] == static_cast<float>(uu + s.w * (c.values()[i] - uu));
        }
    }
    return {identity < 1e-5 && low < 1e-5 && bitwise,
            fmt::format("w_d=1 error {:.2e}, low-band error {:.2e}, standard CFG bitwise {}", identity, low, bitwise)};
}

Outcome inversion_round_trip() {
    const auto t0 = Clock::now();
    const Shape shape{kChannels, kNative, kNative};
    const ProceduralModel m;
    const auto gmm = GaussianMixture::procedural(shape, m.components, m.stddev, m.seed);
    const AnalyticBackend backend(gmm);
    std::vector<double> errors;
    bool monotone = true;
    double at50 = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        // A unit-scale draw from component `seed` of the prior.
        const auto k = seed % gmm.size();
        const Field x = lincomb(1.0f, gmm.components()[k].mean, static_cast<float>(m.stddev), noise_field(shape, seed));
        const std::string cond = std::to_string(k);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t n : {25u, 50u, 100u, 200u}) {
            const auto sched = build_schedule(ScheduleParams{ScheduleKind::karras_rho7, n, 0.002, 80.0});
            const auto rec = ddim_invert(x, sched, backend, cond);
            const double err = max_err(ddim_sample(rec.noise(), sched, backend, conditional_only(), cond), x);
            monotone &= err <= prev;
            if (n == 50) at50 = std::max(at50, err);
            prev = err;
            errors.push_back(err);
        }
    }
    const double t = seconds_since(t0);
    return {at50 < 5e-2 && monotone && t < 30.0,
            fmt::format("N=50 max error {:.3e}, N=25..200 (seed 1) {:.3e} {:.3e} {:.3e} {:.3e}, {:.2f} s", at50,
                        errors[0], errors[1], errors[2], errors[3], t)};
}

Outcome linear_ode_oracle() {
    const double s = 0.5, sa = 10.0, sb = 0.3;
    const Field z0 = noise_field(Shape{1, 8, 8}, 4, sa);
    const AnalyticBackend backend(GaussianMixture({MixtureComponent{1.0, Field(z0.shape(), 0.0f), s}}));
    const Field exact = scaled(z0, static_cast<float>(std::sqrt((s * s + sb * sb) / (s * s + sa * sa))));
    std::vector<double> errors;
    for (std::size_t n : {25u, 50u, 100u, 200u, 400u}) {
        std::vector<double> sigmas;
        for (std::size_t i = 0; i <= n; ++i) {
            sigmas.push_back(sa * std::pow(sb / sa, static_cast<double>(i) / static_cast<double>(n)));
        }
        errors.push_back(max_err(ddim_sample(z0, sigmas, backend, conditional_only(), std::nullopt), exact));
    }
    bool first_order = true;
    std::string ratios;
    for (std::size_t k = 1; k < errors.size(); ++k) {
        const double r = errors[k - 1] / errors[k];
        first_order &= r > 1.7 && r < 2.3;
        ratios += fmt::format("{}{:.3f}", k > 1 ? " " : "", r);
    }
    return {first_order, fmt::format("errors N=25 {:.2e} .. N=400 {:.2e}, halving ratios {}", errors.front(),
                                     errors.back(), ratios)};
}

Outcome tiling_properties() {
    double unity = 0.0;
    for (std::size_t ch : {64u, 100u, 128u, 130u, 256u}) {
        for (std::size_t cw : {64u, 70u, 192u}) {
            for (std::size_t p : {16u, 33u, 64u}) {
                const PatchLayout layout = plan_layout(ch, cw, p, p);
                Field acc(Shape{1, ch, cw}, 0.0f);
                for (std::size_t i = 0; i < layout.size(); ++i) accumulate(acc, layout, i, Field(Shape{1, p, p}, 1.0f));
                for (float v : acc.values()) unity = std::max(unity, std::abs(static_cast<double>(v) - 1.0));
            }
        }
    }

    const auto backend = default_backend();
    const auto sched = build_schedule(ScheduleParams{ScheduleKind::karras_rho7, 12, 0.002, 80.0});
    GuidanceConfig g;
    g.skip_tau_index = 4;
    InversionOptions opts;
    opts.retain_below = g.skip_tau_index;
    const Field canvas = noise_field(Shape{kChannels, 128, 160}, 7, 0.5);
    const PatchLayout layout = plan_layout(128, 160, kNative, kNative);
    std::vector<TrajectoryRecord> inverted;
    std::vector<Field> noise;
    for (std::size_t p = 0; p < layout.size(); ++p) {
        inverted.push_back(ddim_invert(extract(canvas, layout, p), sched, backend, std::string("1"), opts));
        noise.push_back(inverted.back().noise());
    }
    const Field z_T = blend(layout, noise, kChannels);
    const StageContext ctx{std::string("1"), 0, 0, {}, {}};
    const Field ref = sample_tiled(z_T, layout, sched, g, backend, inverted, ctx, 1);
    bool batch_invariant = true;
    for (std::size_t batch : {2u, 4u, 7u, 64u}) {
        batch_invariant &= sample_tiled(z_T, layout, sched, g, backend, inverted, ctx, batch) == ref;
    }

    const Field x0 = noise_field(Shape{kChannels, kNative, kNative}, 8, 0.5);
    const auto rec = ddim_invert(x0, sched, backend, std::string("1"), opts);
    const PatchLayout single = plan_layout(kNative, kNative, kNative, kNative);
    const bool single_equal = sample_tiled(rec.noise(), single, sched, g, backend, {rec}, ctx, 4) ==
                              ddim_sample(rec.noise(), sched, backend, g, std::string("1"), &rec);

    return {unity <= 1e-6 && batch_invariant && single_equal,
            fmt::format("partition of unity error {:.2e}, batch invariance {}, single patch == untiled {}", unity,
                        batch_invariant, single_equal)};
}

Outcome reproduction_property() {
    const auto backend = default_backend();
    PipelineConfig cfg = desk_config();
    cfg.stages.clear();
    const ImageBuffer base = run_pipeline(cfg, backend, kChannels).image;

    StageConfig stage;
    stage.height = stage.width = 2 * kNative;
    stage.schedule.steps = 200;
    stage.guidance.mode = GuidanceMode::conditional_only;
    stage.guidance.skip_tau_index = 0;
    const StageContext ctx{cfg.condition, cfg.seed + 1, 0, {}, {}};
    const ImageBuffer out = run_stage(base, stage, backend, ctx);
    const double p = psnr(out, lanczos_resize(base, stage.height, stage.width));
    return {p >= 40.0, fmt::format("PSNR vs Lanczos-upscaled input {:.2f} dB at N=200", p)};
}

Outcome structure_preservation() {
    // Worst case over every condition of the model.
    const int threads = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto backend = default_backend();
    double worst_psnr = std::numeric_limits<double>::infinity(), worst_ratio = 0.0, worst_time = 0.0;
    std::string per_condition;
    for (std::size_t c = 0; c < ProceduralModel{}.components; ++c) {
        auto cfg = desk_config();
        cfg.condition = std::to_string(c);
        const auto t0 = Clock::now();
        const auto r = run_pipeline(cfg, backend, kChannels);
        const double t = seconds_since(t0);
        const double p = psnr(lanczos_resize(r.image, kNative, kNative), r.base);
        const auto& last = cfg.stages.back();
        const auto seams =
            seam_statistic(r.image, plan_layout(last.height, last.width, last.patch_height, last.patch_width));
        worst_psnr = std::min(worst_psnr, p);
        worst_ratio = std::max(worst_ratio, seams.ratio());
        worst_time = std::max(worst_time, t);
        per_condition += fmt::format("{}{:.2f}/{:.3f}", c ? " " : "", p, seams.ratio());
    }
    omp_set_num_threads(threads);
    return {worst_psnr >= 28.0 && worst_ratio <= 1.5 && worst_time < 60.0,
            fmt::format("min downsampled PSNR {:.2f} dB, max seam ratio {:.3f}, slowest run {:.1f} s single-threaded "
                        "(per condition PSNR/seam: {})",
                        worst_psnr, worst_ratio, worst_time, per_condition)};
}

Outcome skip_contract() {
    const Field cur = noise_field(Shape{kChannels, 16, 16}, 11), inv = noise_field(Shape{kChannels, 16, 16}, 12);
    constexpr std::size_t steps = 50;
    bool untouched = true, envelope = true, differ = true;
    for (auto orientation : {SkipOrientation::prose, SkipOrientation::literal}) {
        GuidanceConfig g;
        g.skip_orientation = orientation;
        g.skip_tau_index = 30;
        for (std::size_t i = 0; i < steps; ++i) {
            const Field out = skip_residual_mix(cur, inv, i, steps, g);
            if (i >= g.skip_tau_index) {
                untouched &= out == cur;
                continue;
            }
            for (std::size_t j = 0; j < out.size(); ++j) {
                const float a = cur.values()[j], b = inv.values()[j], v = out.values()[j];
                envelope &= v >= std::min(a, b) && v <= std::max(a, b);
            }
        }
    }
    GuidanceConfig prose, literal;
    prose.skip_tau_index = literal.skip_tau_index = 30;
    literal.skip_orientation = SkipOrientation::literal;
    differ = !(skip_residual_mix(cur, inv, 5, steps, prose) == skip_residual_mix(cur, inv, 5, steps, literal));
    differ &= skip_orientation_from_string("prose") == SkipOrientation::prose &&
              skip_orientation_from_string("literal") == SkipOrientation::literal;
    return {untouched && envelope && differ,
            fmt::format("untouched from tau {}, convex envelope {}, orientations selectable and distinct {}", untouched,
                        envelope, differ)};
}

Outcome ablation_arms() {
    const auto backend = default_backend();
    const auto full = desk_config();
    const std::string reference = image_hash(run_pipeline(full, backend, kChannels).image);

    std::vector<std::pair<std::string, PipelineConfig>> arms;
    auto arm = full;
    for (auto& s : arm.stages) s.guidance.mode = GuidanceMode::standard_cfg;
    arms.emplace_back("standard-cfg", arm);
    arm = full;
    for (auto& s : arm.stages) s.guidance.mode = GuidanceMode::low_band_only;
    arms.emplace_back("low-band-only", arm);
    arm = full;
    for (auto& s : arm.stages) s.invert = false;
    arms.emplace_back("no-inversion", arm);
    arm = full;
    arm.stages = one_shot_plan(4 * kNative, StageConfig{});
    arms.emplace_back("one-shot", arm);

    std::set<std::string> hashes{reference};
    std::string detail;
    for (const auto& [name, cfg] : arms) {
        const std::string h = image_hash(run_pipeline(cfg, backend, kChannels).image);
        hashes.insert(h);
        detail += fmt::format("{}{}={}", detail.empty() ? "" : ", ", name, h.substr(0, 8));
    }
    return {hashes.size() == arms.size() + 1, fmt::format("full={}, {}", reference.substr(0, 8), detail)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"wavelet perfect reconstruction", wavelet_reconstruction},
        {"guidance identities", guidance_identities},
        {"inversion round trip", inversion_round_trip},
        {"linear-ODE oracle", linear_ode_oracle},
        {"tiling", tiling_properties},
        {"reproduction property", reproduction_property},
        {"structure preservation", structure_preservation},
        {"skip residual contract", skip_contract},
        {"ablation arms", ablation_arms},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        failures += o.pass ? 0 : 1;
        fmt::print("{} {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
