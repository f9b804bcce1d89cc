// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

// Command-line front end: generate, upscale, invert, inspect-bands, psnr and
// layout subcommands over the analytic or remote backend.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hiwave/denoise.hpp"
#include "hiwave/errors.hpp"
#include "hiwave/imaging.hpp"
#include "hiwave/pipeline.hpp"
#include "hiwave/remote.hpp"
#include "hiwave/sampler.hpp"
#include "hiwave/tiling.hpp"
#include "hiwave/wavelet.hpp"

namespace {

using namespace hiwave;

struct BackendOptions {
    std::string kind = "analytic";
    std::string remote_url = "http://127.0.0.1:8000";
    std::size_t components = ProceduralModel{}.components;
    double stddev = ProceduralModel{}.stddev;
    std::uint64_t model_seed = ProceduralModel{}.seed;
};

struct SamplingOptions {
    std::size_t steps = 50;
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    std::string schedule = "karras_rho7";
    double w = 7.5;
    double w_d = 7.5;
    std::string mode = "frequency_guided";
    std::string wavelet = "sym4";
    std::string boundary = "periodization";
    double alpha = 3.0;
    std::string orientation = "prose";
    std::vector<std::size_t> tau;
    std::size_t patch = 64;
    std::size_t batch = 4;
    bool no_invert = false;
};

void add_backend_options(CLI::App* app, BackendOptions& b) {
    app->add_option("--backend", b.kind, "Denoiser backend")->check(CLI::IsMember({"analytic", "remote"}));
    app->add_option("--remote-url", b.remote_url, "Base URL of the denoiser service");
    app->add_option("--components", b.components, "Analytic model: mixture components")->check(CLI::PositiveNumber);
    app->add_option("--stddev", b.stddev, "Analytic model: component standard deviation")->check(CLI::PositiveNumber);
    app->add_option("--model-seed", b.model_seed, "Analytic model: seed for the component means");
}

void add_sampling_options(CLI::App* app, SamplingOptions& s) {
    app->add_option("--steps", s.steps, "Sampling steps per stage")->check(CLI::PositiveNumber);
    app->add_option("--sigma-min", s.sigma_min, "Smallest noise level");
    app->add_option("--sigma-max", s.sigma_max, "Largest noise level");
    app->add_option("--schedule", s.schedule, "Noise schedule")->check(CLI::IsMember({"karras_rho7", "linear_sigma"}));
    app->add_option("--w", s.w, "Guidance strength of standard CFG (also used for the base image)");
    app->add_option("--wd", s.w_d, "Guidance strength on the detail bands");
    app->add_option("--mode", s.mode, "Guidance mode")
        ->check(CLI::IsMember({"frequency_guided", "standard_cfg", "low_band_only", "conditional_only"}));
    app->add_option("--wavelet", s.wavelet, "Wavelet")->check(CLI::IsMember({"sym4", "haar"}));
    app->add_option("--wavelet-boundary", s.boundary, "Wavelet boundary handling")
        ->check(CLI::IsMember({"periodization", "symmetric"}));
    app->add_option("--alpha", s.alpha, "Skip residual decay exponent");
    app->add_option("--skip-orientation", s.orientation, "Which latent the cosine weight multiplies")
        ->check(CLI::IsMember({"prose", "literal"}));
    app->add_option("--tau", s.tau, "Per-stage skip residual cutoff step (default 0.3 and 0.6 of --steps)")
        ->delimiter(',');
    app->add_option("--patch", s.patch, "Patch size in latent pixels")->check(CLI::PositiveNumber);
    app->add_option("--batch", s.batch, "Patches processed per batch")->check(CLI::PositiveNumber);
    app->add_flag("--no-invert", s.no_invert, "Start patches from noise instead of inverted latents");
}

ScheduleParams schedule_params(const SamplingOptions& s) {
    ScheduleParams p;
    p.kind = schedule_kind_from_string(s.schedule);
    p.steps = s.steps;
    p.sigma_min = s.sigma_min;
    p.sigma_max = s.sigma_max;
    return p;
}

GuidanceConfig guidance_config(const SamplingOptions& s) {
    GuidanceConfig g;
    g.w = s.w;
    g.w_d = s.w_d;
    g.mode = guidance_mode_from_string(s.mode);
    g.wavelet = WaveletFilter::by_name(s.wavelet).kind;
    g.boundary = boundary_from_string(s.boundary);
    g.alpha = s.alpha;
    g.skip_orientation = skip_orientation_from_string(s.orientation);
    return g;
}

std::vector<StageConfig> stage_plan(const SamplingOptions& s, const std::vector<std::size_t>& targets) {
    std::vector<StageConfig> plan;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        StageConfig st;
        st.height = st.width = targets[k];
        st.schedule = schedule_params(s);
        st.guidance = guidance_config(s);
        st.patch_height = st.patch_width = s.patch;
        st.batch_size = s.batch;
        st.invert = !s.no_invert;
        if (!s.tau.empty()) {
            st.guidance.skip_tau_index = s.tau[std::min(k, s.tau.size() - 1)];
        } else {
            const double frac = k == 0 ? 0.3 : 0.6;
            st.guidance.skip_tau_index = static_cast<std::size_t>(std::lround(frac * static_cast<double>(s.steps)));
        }
        plan.push_back(st);
    }
    return plan;
}

std::unique_ptr<Backend> make_backend(const BackendOptions& b, std::size_t channels, std::size_t patch) {
    if (b.kind == "remote") {
        RemoteConfig rc;
        rc.url = b.remote_url;
        return std::make_unique<RemoteBackend>(rc);
    }
    return std::make_unique<AnalyticBackend>(
        GaussianMixture::procedural(Shape{channels, patch, patch}, b.components, b.stddev, b.model_seed));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw IoError(fmt::format("cannot write '{}'", path.string()));
    os << j.dump(2) << '\n';
}

void print_nested(const std::exception& e, int depth = 0) {
    std::cerr << (depth == 0 ? "error: " : "  caused by: ") << e.what() << '\n';
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        print_nested(inner, depth + 1);
    }
}

ImageBuffer band_image(const Field& band) {
    Field f = band;
    float lo = f.values()[0], hi = lo;
    for (float v : f.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const float span = hi > lo ? hi - lo : 1.0f;
    for (auto& v : f.values()) v = (v - lo) / span;
    return ImageBuffer(std::move(f));
}

nlohmann::json band_stats(const Field& band) {
    double sum = 0.0, sq = 0.0;
    float lo = band.values()[0], hi = lo;
    for (float v : band.values()) {
        sum += v;
        sq += static_cast<double>(v) * v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const auto n = static_cast<double>(band.size());
    return {{"shape", {band.channels(), band.height(), band.width()}},
            {"mean", sum / n},
            {"energy", sq},
            {"min", lo},
            {"max", hi}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HiWave frequency-guided tiled diffusion sampler"};
    app.require_subcommand(1);

    BackendOptions backend_opts;
    SamplingOptions sampling;
    std::filesystem::path out_dir = "out";

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a base image and upscale it progressively");
    std::string condition;
    std::uint64_t seed = 0;
    std::vector<std::size_t> plan_sizes{64, 128, 256};
    bool one_shot = false;
    gen->add_option("--condition,--prompt", condition, "Condition (analytic: component index)");
    gen->add_option("--seed", seed, "Random seed");
    gen->add_option("--plan", plan_sizes, "Native size followed by stage sizes")->delimiter(',');
    gen->add_flag("--one-shot", one_shot, "Go from native size straight to the last plan size");
    gen->add_option("--out", out_dir, "Output directory");
    add_backend_options(gen, backend_opts);
    add_sampling_options(gen, sampling);

    // upscale
    auto* up = app.add_subcommand("upscale", "Upscale an existing image");
    std::filesystem::path input;
    std::vector<std::size_t> targets;
    up->add_option("--input", input, "Input image (PNG/PGM/PPM)")->required()->check(CLI::ExistingFile);
    up->add_option("--plan", targets, "Stage target sizes, e.g. 128,256")->required()->delimiter(',');
    up->add_option("--condition,--prompt", condition, "Condition (analytic: component index)");
    up->add_option("--seed", seed, "Random seed");
    up->add_option("--out", out_dir, "Output directory");
    add_backend_options(up, backend_opts);
    add_sampling_options(up, sampling);

    // invert
    auto* inv = app.add_subcommand("invert", "DDIM-invert an image and store the trajectory");
    double inversion_w = 1.0;
    inv->add_option("--input", input, "Input image")->required()->check(CLI::ExistingFile);
    inv->add_option("--condition,--prompt", condition, "Condition (analytic: component index)");
    inv->add_option("--inversion-w", inversion_w, "Guidance strength during inversion");
    inv->add_option("--out", out_dir, "Trajectory directory");
    add_backend_options(inv, backend_opts);
    add_sampling_options(inv, sampling);

    // inspect-bands
    auto* bands = app.add_subcommand("inspect-bands", "Write the four wavelet bands of an image");
    bands->add_option("--input", input, "Input image")->required()->check(CLI::ExistingFile);
    bands->add_option("--wavelet", sampling.wavelet, "Wavelet")->check(CLI::IsMember({"sym4", "haar"}));
    bands->add_option("--wavelet-boundary", sampling.boundary, "Boundary handling")
        ->check(CLI::IsMember({"periodization", "symmetric"}));
    bands->add_option("--out", out_dir, "Output directory");

    // psnr
    auto* ps = app.add_subcommand("psnr", "PSNR in dB between two images of the same size");
    std::filesystem::path a_path, b_path;
    ps->add_option("a", a_path, "First image")->required()->check(CLI::ExistingFile);
    ps->add_option("b", b_path, "Second image")->required()->check(CLI::ExistingFile);

    // layout
    auto* lay = app.add_subcommand("layout", "Print the patch layout of a canvas as JSON");
    std::size_t canvas_h = 128, canvas_w = 0;
    lay->add_option("--height", canvas_h, "Canvas height")->check(CLI::PositiveNumber);
    lay->add_option("--width", canvas_w, "Canvas width (default: height)");
    lay->add_option("--patch", sampling.patch, "Patch size")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    const std::optional<std::string> cond = condition.empty() ? std::nullopt : std::optional<std::string>(condition);
    try {
        if (*gen) {
            if (plan_sizes.empty()) throw ConfigError("--plan needs at least the native size");
            const std::size_t native = plan_sizes.front();
            std::vector<std::size_t> stage_sizes(plan_sizes.begin() + 1, plan_sizes.end());
            if (one_shot && !stage_sizes.empty()) stage_sizes = {stage_sizes.back()};
            const auto backend = make_backend(backend_opts, 3, sampling.patch);
            PipelineConfig pc;
            pc.condition = cond;
            pc.seed = seed;
            pc.native_height = pc.native_width = native;
            pc.base_schedule = schedule_params(sampling);
            pc.base_guidance = guidance_config(sampling);
            pc.base_guidance.mode = GuidanceMode::standard_cfg;
            pc.stages = stage_plan(sampling, stage_sizes);
            const auto result = run_pipeline(pc, *backend, 3, out_dir);
            fmt::print("{}\n", result.manifest_json().dump(2));
        } else if (*up) {
            const ImageBuffer img = load_image(input);
            const auto backend = make_backend(backend_opts, img.channels(), sampling.patch);
            const auto plan = stage_plan(sampling, targets);
            std::filesystem::create_directories(out_dir);
            ImageBuffer current = img;
            nlohmann::json stages = nlohmann::json::array();
            for (std::size_t k = 0; k < plan.size(); ++k) {
                StageReport report;
                current = run_stage(current, plan[k], *backend, StageContext{cond, seed + k + 1, k, out_dir / "scratch", {}},
                                    &report);
                const auto path = out_dir / fmt::format("stage_{}.png", k + 1);
                save_image(current, path);
                auto entry = to_json(plan[k]);
                entry["seconds"] = report.seconds;
                entry["hash"] = image_hash(current);
                entry["path"] = path.string();
                stages.push_back(entry);
            }
            std::filesystem::remove_all(out_dir / "scratch");
            const nlohmann::json manifest = {{"input", input.string()},
                                             {"input_hash", image_hash(img)},
                                             {"seed", seed},
                                             {"backend", backend->describe()},
                                             {"stages", stages}};
            write_json(out_dir / "manifest.json", manifest);
            fmt::print("{}\n", manifest.dump(2));
        } else if (*inv) {
            const ImageBuffer img = load_image(input);
            const auto backend = make_backend(backend_opts, img.channels(), img.height());
            const Field z = encode_latent(img, *backend);
            InversionOptions opts;
            opts.guidance_w = inversion_w;
            const auto rec = ddim_invert(z, build_schedule(schedule_params(sampling)), *backend, cond, opts);
            save_trajectory(rec, out_dir);
            fmt::print("wrote {} levels to {}\n", rec.sigmas().size(), out_dir.string());
        } else if (*bands) {
            const ImageBuffer img = load_image(input);
            const auto& filter = WaveletFilter::by_name(sampling.wavelet);
            const auto wb = dwt2(img.pixels(), filter, boundary_from_string(sampling.boundary));
            std::filesystem::create_directories(out_dir);
            nlohmann::json report;
            const std::pair<const char*, const Field*> named[] = {
                {"low", &wb.low}, {"horizontal", &wb.horizontal}, {"vertical", &wb.vertical}, {"diagonal", &wb.diagonal}};
            for (const auto& [name, band] : named) {
                save_image(band_image(*band), out_dir / fmt::format("{}.png", name));
                report[name] = band_stats(*band);
            }
            fmt::print("{}\n", report.dump(2));
        } else if (*ps) {
            fmt::print("{:.4f}\n", psnr(load_image(a_path), load_image(b_path)));
        } else if (*lay) {
            const auto layout = plan_layout(canvas_h, canvas_w == 0 ? canvas_h : canvas_w, sampling.patch, sampling.patch);
            fmt::print("{}\n", layout_to_json(layout).dump(2));
        }
    } catch (const std::exception& e) {
        print_nested(e);
        return 1;
    }
    return 0;
}
