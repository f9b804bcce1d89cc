// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "hiwave/errors.hpp"
#include "hiwave/pipeline.hpp"
#include "hiwave/remote.hpp"
#include "hiwave/wavelet.hpp"
#include "support/echo_server.hpp"
#include "support/helpers.hpp"

using namespace hiwave;

namespace {

constexpr std::size_t kNative = 16;

AnalyticBackend small_backend(double stddev = 0.1) {
    return AnalyticBackend(GaussianMixture::procedural(Shape{3, kNative, kNative}, 3, stddev, 11));
}

StageConfig prototype(std::size_t steps = 10) {
    StageConfig s;
    s.schedule.steps = steps;
    s.patch_height = s.patch_width = kNative;
    s.batch_size = 2;
    return s;
}

PipelineConfig small_config(std::size_t stages = 1) {
    PipelineConfig cfg;
    cfg.condition = "1";
    cfg.seed = 42;
    cfg.native_height = cfg.native_width = kNative;
    cfg.base_schedule.steps = 10;
    cfg.stages = progressive_plan(kNative, stages, prototype());
    return cfg;
}

// Delegates to an analytic backend and fails on unconditional calls below a
// noise level; conditional-only inversion and base sampling never trigger it.
class FailingBackend final : public Backend {
public:
    FailingBackend(const Backend& inner, double below) : inner_(inner), below_(below) {}
    Field denoise(const DenoiseRequest& req) const override {
        if (!req.condition && req.sigma < below_) throw BackendError("injected", 2, 500, true);
        return inner_.denoise(req);
    }
    Field encode(const Field& f) const override { return inner_.encode(f); }
    Field decode(const Field& f) const override { return inner_.decode(f); }
    std::string describe() const override { return "failing"; }

private:
    const Backend& inner_;
    double below_;
};

}  // namespace

TEST_CASE("progressive and one-shot plans") {
    const auto plan = progressive_plan(64, 2, prototype(50));
    REQUIRE(plan.size() == 2);
    CHECK(plan[0].height == 128);
    CHECK(plan[1].width == 256);
    CHECK(plan[0].guidance.skip_tau_index == 15);
    CHECK(plan[1].guidance.skip_tau_index == 30);
    const auto one = one_shot_plan(256, prototype(50));
    REQUIRE(one.size() == 1);
    CHECK(one[0].height == 256);
    CHECK(one[0].guidance.skip_tau_index == 15);
}

TEST_CASE("analytic base images concentrate on the conditioned component") {
    const Shape shape{1, 4, 4};
    const double s0 = 0.05;
    const Field mu0 = testing::random_field(shape, 3, 0.4);
    const Field mu1 = testing::random_field(shape, 4, 0.4);
    const AnalyticBackend backend(GaussianMixture({{0.5, mu0, s0}, {0.5, mu1, 0.1}}));
    const GuidanceConfig guidance = PipelineConfig{}.base_guidance;
    ScheduleParams fine;
    fine.steps = 1000;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const ImageBuffer img = generate_base(backend, std::string("0"), seed, 1, 4, 4, ScheduleParams{}, guidance);
        const ImageBuffer ref = generate_base(backend, std::string("0"), seed, 1, 4, 4, fine, guidance);
        const Field latent = encode_latent(img, backend);
        for (std::size_t i = 0; i < latent.size(); ++i) {
            CHECK(std::abs(latent.values()[i] - mu0.values()[i]) < 3.0 * s0);
        }
        CHECK(max_abs_diff(img.pixels(), ref.pixels()) < 0.5 * s0);
        CHECK(img == generate_base(backend, std::string("0"), seed, 1, 4, 4, ScheduleParams{}, guidance));
    }
}

TEST_CASE("remote base generation is passed through") {
    testing::EchoServer server;
    RemoteConfig rc;
    rc.url = server.url();
    rc.backoff = std::chrono::milliseconds(1);
    RemoteBackend backend(rc);
    const auto img = generate_base(backend, std::string("a cat"), 1, 3, 8, 8, ScheduleParams{}, GuidanceConfig{});
    CHECK(img.height() == 8);
    CHECK(img.pixels().values()[3] == doctest::Approx(3.0 / 7.0));
}

TEST_CASE("a single-patch stage equals untiled sampling bitwise") {
    const auto backend = small_backend();
    const auto sched = build_schedule(prototype().schedule);
    GuidanceConfig g;
    g.skip_tau_index = 4;
    const Field x0 = testing::random_field(Shape{3, kNative, kNative}, 5, 0.5);
    InversionOptions opts;
    opts.retain_below = g.skip_tau_index;
    const auto rec = ddim_invert(x0, sched, backend, std::string("0"), opts);
    const PatchLayout layout = plan_layout(kNative, kNative, kNative, kNative);
    REQUIRE(layout.size() == 1);
    const StageContext ctx{std::string("0"), 0, 0, {}, {}};
    const Field tiled = sample_tiled(rec.noise(), layout, sched, g, backend, {rec}, ctx, 1);
    const Field plain = ddim_sample(rec.noise(), sched, backend, g, std::string("0"), &rec);
    CHECK(tiled == plain);
}

TEST_CASE("an empty plan returns the base image") {
    const auto backend = small_backend();
    PipelineConfig cfg = small_config(0);
    const auto r = run_pipeline(cfg, backend, 3);
    CHECK(r.image == r.base);
    CHECK(r.stage_images.empty());
    CHECK(r.manifest_json()["final_hash"] == image_hash(r.base));
}

TEST_CASE("pipeline runs are reproducible and write a manifest") {
    const auto backend = small_backend();
    const auto out = std::filesystem::temp_directory_path() / "hiwave_pipeline_test";
    std::filesystem::remove_all(out);
    const auto cfg = small_config(2);
    const auto a = run_pipeline(cfg, backend, 3, out);
    const auto b = run_pipeline(cfg, backend, 3);
    CHECK(a.image == b.image);
    CHECK(a.image.height() == 4 * kNative);
    REQUIRE(a.reports.size() == 2);
    CHECK(a.reports[0].patches == 9);
    CHECK(std::filesystem::exists(out / "base.png"));
    CHECK(std::filesystem::exists(out / "stage_2.png"));
    std::ifstream is(out / "manifest.json");
    const auto manifest = nlohmann::json::parse(is);
    CHECK(manifest["final_hash"] == image_hash(a.image));
    CHECK(manifest["stages"].size() == 2);
    CHECK(manifest["seed"] == 42);
    CHECK(manifest["stages"][1]["guidance"]["mode"] == "frequency_guided");
    std::filesystem::remove_all(out);
}

TEST_CASE("trajectories spill to disk under a small budget") {
    const auto backend = small_backend();
    auto cfg = small_config(1);
    const auto in_memory = run_pipeline(cfg, backend, 3);
    cfg.stages[0].trajectory_budget_bytes = 1;
    const auto work = std::filesystem::temp_directory_path() / "hiwave_spill_test";
    std::filesystem::remove_all(work);
    cfg.work_dir = work;
    const auto spilled = run_pipeline(cfg, backend, 3);
    CHECK(spilled.reports[0].spilled);
    CHECK_FALSE(in_memory.reports[0].spilled);
    CHECK(std::filesystem::exists(work / "stage0_patch0000"));
    CHECK(spilled.image == in_memory.image);
    std::filesystem::remove_all(work);
}

TEST_CASE("backend failures carry stage, patch and step") {
    const auto inner = small_backend();
    const auto sched = build_schedule(prototype().schedule);
    const double threshold = 5.0;
    std::size_t expected_step = 0;
    while (sched.sigmas()[expected_step] >= threshold) ++expected_step;
    FailingBackend backend(inner, threshold);
    auto cfg = small_config(1);
    cfg.base_guidance.mode = GuidanceMode::conditional_only;
    try {
        run_pipeline(cfg, backend, 3);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == 0);
        CHECK(e.patch() == 0);
        CHECK(e.step() == static_cast<int>(expected_step));
        CHECK(std::string(e.what()).find("injected") != std::string::npos);
        try {
            std::rethrow_if_nested(e);
            FAIL("expected a nested error");
        } catch (const BackendError& be) {
            CHECK(be.attempts() == 2);
            CHECK(be.status() == 500);
        }
    }
}

TEST_CASE("invalid stage configurations are pipeline errors") {
    const auto backend = small_backend();
    auto cfg = small_config(1);
    cfg.stages[0].patch_height = 64;
    CHECK_THROWS_AS(run_pipeline(cfg, backend, 3), PipelineError);
    cfg = small_config(1);
    cfg.stages[0].height = 8;
    CHECK_THROWS_AS(run_pipeline(cfg, backend, 3), PipelineError);
    cfg = small_config(1);
    cfg.stages[0].guidance.skip_tau_index = 99;
    CHECK_THROWS_AS(run_pipeline(cfg, backend, 3), PipelineError);
}

TEST_CASE("ablation arms produce different images") {
    const auto backend = small_backend();
    std::set<std::string> hashes;
    auto cfg = small_config(1);
    hashes.insert(image_hash(run_pipeline(cfg, backend, 3).image));
    auto arm = cfg;
    arm.stages[0].guidance.mode = GuidanceMode::standard_cfg;
    hashes.insert(image_hash(run_pipeline(arm, backend, 3).image));
    arm = cfg;
    arm.stages[0].guidance.mode = GuidanceMode::low_band_only;
    hashes.insert(image_hash(run_pipeline(arm, backend, 3).image));
    arm = cfg;
    arm.stages[0].invert = false;
    hashes.insert(image_hash(run_pipeline(arm, backend, 3).image));
    CHECK(hashes.size() == 4);
}

TEST_CASE("frequency-guided stages keep the conditional low band") {
    const auto backend = small_backend();
    const auto cfg = small_config(1);
    std::mutex mu;
    std::size_t calls = 0;
    float worst = 0.0f;
    const auto& filter = WaveletFilter::sym4();
    run_pipeline(cfg, backend, 3, {},
                 [&](std::size_t, std::size_t, std::size_t, double, const Field& c, const Field* u, const Field& g) {
                     REQUIRE(u != nullptr);
                     const float err = max_abs_diff(dwt2(g, filter).low, dwt2(c, filter).low);
                     std::lock_guard lock(mu);
                     ++calls;
                     worst = std::max(worst, err);
                 });
    CHECK(calls == cfg.stages[0].schedule.steps * 9);
    CHECK(worst < 1e-5f);
}

TEST_CASE("conditional-only stages without skip residuals give valid images") {
    const auto backend = small_backend();
    auto cfg = small_config(1);
    cfg.stages[0].guidance.mode = GuidanceMode::conditional_only;
    cfg.stages[0].guidance.skip_tau_index = 0;
    const auto r = run_pipeline(cfg, backend, 3);
    for (float v : r.image.pixels().values()) CHECK((v >= 0.0f && v <= 1.0f));
    CHECK(psnr(lanczos_resize(r.image, kNative, kNative), r.base) > 20.0);
}

TEST_CASE("seam statistic separates visible seams") {
    const PatchLayout layout = plan_layout(32, 32, 16, 16);
    Field f(Shape{1, 32, 32});
    for (std::size_t y = 0; y < 32; ++y) {
        for (std::size_t x = 0; x < 32; ++x) f.at(0, y, x) = 0.5f + 0.001f * static_cast<float>((x * 7 + y * 3) % 5);
    }
    const auto smooth = seam_statistic(ImageBuffer(f), layout);
    for (std::size_t y = 0; y < 32; ++y) {
        for (std::size_t x = 16; x < 32; ++x) f.at(0, y, x) += 0.2f;
    }
    const auto seam = seam_statistic(ImageBuffer(f), layout);
    CHECK(smooth.ratio() < 1.5);
    CHECK(seam.ratio() > 10.0);
}
