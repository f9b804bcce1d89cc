// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "hiwave/denoise.hpp"
#include "hiwave/errors.hpp"
#include "hiwave/kernels.hpp"
#include "hiwave/rng.hpp"

namespace hiwave {

std::optional<Field> Backend::generate_base(const std::string&, std::uint64_t, std::size_t, std::size_t) const {
    return std::nullopt;
}

Field denoise(const Backend& backend, const DenoiseRequest& req) {
    if (!(req.sigma >= 0.0) || !std::isfinite(req.sigma)) {
        throw ConfigError(fmt::format("denoise: sigma must be finite and >= 0, got {}", req.sigma));
    }
    require_finite(req.latent, "denoise input");
    Field out = backend.denoise(req);
    require_same_shape(req.latent.shape(), out.shape(), "denoise output");
    require_finite(out, "denoise output");
    return out;
}

GaussianMixture::GaussianMixture(std::vector<MixtureComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw ConfigError("gaussian mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0)) throw ConfigError(fmt::format("mixture weight must be positive, got {}", c.weight));
        if (!(c.stddev > 0.0)) throw ConfigError(fmt::format("mixture stddev must be positive, got {}", c.stddev));
        require_same_shape(components_.front().mean.shape(), c.mean.shape(), "gaussian mixture means");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError(fmt::format("mixture weights sum to {}, expected 1", total));
}

GaussianMixture GaussianMixture::procedural(Shape shape, std::size_t count, double stddev, std::uint64_t seed) {
    if (count == 0) throw ConfigError("procedural mixture needs at least one component");
    constexpr int kWaves = 8;
    Rng rng(seed);
    std::vector<MixtureComponent> comps;
    for (std::size_t k = 0; k < count; ++k) {
        Field mean(shape);
        for (std::size_t c = 0; c < shape.channels; ++c) {
            struct Wave { double amp, fy, fx, phase; };
            std::vector<Wave> waves;
            double amp_total = 0.0;
            for (int j = 0; j < kWaves; ++j) {
                // Coarse waves carry most of the energy; a few finer ones give
                // the detail bands something to work with. Frequencies are
                // rounded to whole cycles so every mean tiles periodically.
                double fy = 0.0, fx = 0.0;
                while (fy == 0.0 && fx == 0.0) {
                    const double cycles = j < 5 ? 0.5 + 2.5 * rng.uniform() : 4.0 + 8.0 * rng.uniform();
                    const double angle = 2.0 * std::numbers::pi * rng.uniform();
                    fy = std::round(cycles * std::sin(angle));
                    fx = std::round(cycles * std::cos(angle));
                }
                const double amp = (j < 5 ? 1.0 : 0.35) * (0.5 + rng.uniform());
                waves.push_back({amp, fy, fx, 2.0 * std::numbers::pi * rng.uniform()});
                amp_total += amp;
            }
            auto plane = mean.channel(c);
            for (std::size_t y = 0; y < shape.height; ++y) {
                for (std::size_t x = 0; x < shape.width; ++x) {
                    double v = 0.0;
                    for (const auto& w : waves) {
                        v += w.amp * std::cos(2.0 * std::numbers::pi *
                                                  (w.fy * static_cast<double>(y) / static_cast<double>(shape.height) +
                                                   w.fx * static_cast<double>(x) / static_cast<double>(shape.width)) +
                                              w.phase);
                    }
                    plane[y * shape.width + x] = static_cast<float>(0.8 * v / amp_total);
                }
            }
        }
        comps.push_back({1.0 / static_cast<double>(count), std::move(mean), stddev});
    }
    // Guard the weight sum against rounding for counts like 3.
    double rest = 1.0;
    for (std::size_t k = 0; k + 1 < comps.size(); ++k) rest -= comps[k].weight;
    comps.back().weight = rest;
    return GaussianMixture(std::move(comps));
}

std::vector<double> gmm_responsibilities(const GaussianMixture& gmm, const Field& z, double sigma) {
    require_same_shape(gmm.shape(), z.shape(), "gmm_responsibilities");
    const auto dim = static_cast<double>(z.size());
    std::vector<double> logp(gmm.size());
    for (std::size_t i = 0; i < gmm.size(); ++i) {
        const auto& c = gmm.components()[i];
        const double var = c.stddev * c.stddev + sigma * sigma;
        const double d2 = kernels::omp::squared_distance(z.values(), c.mean.values());
        logp[i] = std::log(c.weight) - 0.5 * dim * std::log(2.0 * std::numbers::pi * var) - 0.5 * d2 / var;
    }
    const double top = *std::max_element(logp.begin(), logp.end());
    double total = 0.0;
    for (auto& v : logp) {
        v = std::exp(v - top);
        total += v;
    }
    for (auto& v : logp) v /= total;
    return logp;
}

Field gmm_posterior_mean(const GaussianMixture& gmm, const Field& z, double sigma,
                         std::optional<std::size_t> component) {
    require_same_shape(gmm.shape(), z.shape(), "gmm_posterior_mean");
    if (component && *component >= gmm.size()) {
        throw ConfigError(fmt::format("mixture component {} out of range (mixture has {})", *component, gmm.size()));
    }
    if (sigma == 0.0) return z;

    const double s2 = sigma * sigma;
    std::vector<kernels::MixtureTerm> terms;
    auto term = [&](const MixtureComponent& c, double r) {
        const double v = c.stddev * c.stddev;
        return kernels::MixtureTerm{c.mean.values(), r * v / (v + s2), r * s2 / (v + s2)};
    };
    if (component) {
        terms.push_back(term(gmm.components()[*component], 1.0));
    } else {
        const auto r = gmm_responsibilities(gmm, z, sigma);
        for (std::size_t i = 0; i < gmm.size(); ++i) {
            if (r[i] > 0.0) terms.push_back(term(gmm.components()[i], r[i]));
        }
    }
    Field out(z.shape());
    kernels::omp::mixture_combine(z.values(), terms, out.values());
    return out;
}

std::optional<std::size_t> AnalyticBackend::component_of(const std::optional<std::string>& condition) const {
    if (!condition) return std::nullopt;
    std::size_t idx = 0;
    const auto& s = *condition;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(fmt::format("analytic backend: condition '{}' is not a component index", s));
    }
    if (idx >= gmm_.size()) {
        throw ConfigError(fmt::format("analytic backend: condition {} out of range (mixture has {})", idx, gmm_.size()));
    }
    return idx;
}

Field AnalyticBackend::denoise(const DenoiseRequest& req) const {
    return gmm_posterior_mean(gmm_, req.latent, req.sigma, component_of(req.condition));
}

Field AnalyticBackend::encode(const Field& image) const {
    Field out(image.shape());
    auto src = image.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 2.0f * src[i] - 1.0f;
    return out;
}

Field AnalyticBackend::decode(const Field& latent) const {
    Field out(latent.shape());
    auto src = latent.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 0.5f * (src[i] + 1.0f);
    return out;
}

std::string AnalyticBackend::describe() const {
    const auto& s = gmm_.shape();
    return fmt::format("analytic-gmm(components={}, shape={}x{}x{}, stddev={})", gmm_.size(), s.channels, s.height,
                       s.width, gmm_.components().front().stddev);
}

}  // namespace hiwave
