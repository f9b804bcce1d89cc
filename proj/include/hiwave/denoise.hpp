// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hiwave/field.hpp"

namespace hiwave {

struct DenoiseRequest {
    const Field& latent;
    double sigma = 0.0;
    std::optional<std::string> condition;  // absent: unconditional
};

/// A denoiser D(z, sigma[, y]) returning its estimate of E[x | z] together
/// with the image<->latent adapter of the model behind it. Implementations
/// must tolerate concurrent calls.
class Backend {
public:
    virtual ~Backend() = default;

    virtual Field denoise(const DenoiseRequest& req) const = 0;
    /// `image` holds pixel values in [0, 1].
    virtual Field encode(const Field& image) const = 0;
    virtual Field decode(const Field& latent) const = 0;
    /// Backends that own a generator return the base image directly; the
    /// default asks the engine to sample it.
    virtual std::optional<Field> generate_base(const std::string& condition, std::uint64_t seed,
                                               std::size_t height, std::size_t width) const;
    /// Short identifier recorded in run manifests.
    /// Latent shape produced by encode() for an image of shape `image`.
    /// Identity unless the backend says otherwise.
    virtual Shape latent_shape(const Shape& image) const { return image; }
    virtual std::string describe() const = 0;
};

/// Validates the request (sigma >= 0, finite latent) and the backend's answer
/// (same shape, finite).
Field denoise(const Backend& backend, const DenoiseRequest& req);

struct MixtureComponent {
    double weight;
    Field mean;
    double stddev;
};

/// Parameters of the default analytic model used by the CLI and the
/// acceptance suite.
struct ProceduralModel {
    std::size_t components = 4;
    double stddev = 0.05;
    std::uint64_t seed = 7;
};

/// Isotropic Gaussian mixture over fields of one shape. Its posterior mean
/// under additive Gaussian noise is available in closed form, which makes it
/// an exact denoiser for testing the samplers.
class GaussianMixture {
public:
    /// Throws ConfigError unless weights are positive and sum to 1 (1e-9),
    /// every stddev is positive, and all means share one shape.
    explicit GaussianMixture(std::vector<MixtureComponent> components);

    const std::vector<MixtureComponent>& components() const noexcept { return components_; }
    std::size_t size() const noexcept { return components_.size(); }
    const Shape& shape() const noexcept { return components_.front().mean.shape(); }

    /// Equal-weight mixture whose means are smooth random fields in
    /// [-0.8, 0.8], built from a handful of plane waves per channel.
    static GaussianMixture procedural(Shape shape, std::size_t count, double stddev, std::uint64_t seed);

private:
    std::vector<MixtureComponent> components_;
};

/// Posterior responsibilities r_i(z) for noise level sigma (log-sum-exp).
std::vector<double> gmm_responsibilities(const GaussianMixture& gmm, const Field& z, double sigma);

/// E[x | z] under x ~ gmm, z = x + sigma * eps. With `component` set, the
/// posterior mean of that single component.
Field gmm_posterior_mean(const GaussianMixture& gmm, const Field& z, double sigma,
                         std::optional<std::size_t> component = std::nullopt);

/// Closed-form backend over a Gaussian mixture. The condition string is a
/// component index ("0", "1", ...). Latents are pixels mapped to [-1, 1].
class AnalyticBackend final : public Backend {
public:
    explicit AnalyticBackend(GaussianMixture gmm) : gmm_(std::move(gmm)) {}

    Field denoise(const DenoiseRequest& req) const override;
    Field encode(const Field& image) const override;
    Field decode(const Field& latent) const override;
    std::string describe() const override;

    const GaussianMixture& mixture() const noexcept { return gmm_; }
    std::optional<std::size_t> component_of(const std::optional<std::string>& condition) const;

private:
    GaussianMixture gmm_;
};

}  // namespace hiwave
