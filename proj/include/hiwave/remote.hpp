// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hiwave/denoise.hpp"
#include "hiwave/protocol.hpp"

namespace hiwave {

struct RemoteConfig {
    std::string url = "http://127.0.0.1:8000";
    std::size_t pool_size = 4;
    int max_retries = 3;
    std::chrono::milliseconds backoff{100};  // doubled after every failed attempt
    std::chrono::seconds timeout{120};
};

/// Client for a denoiser service speaking the protocol in protocol.hpp.
/// Synchronous request/response over a bounded pool of keep-alive
/// connections. Transport failures and 5xx answers are retried; 4xx answers
/// fail immediately.
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(RemoteConfig config);
    ~RemoteBackend() override;

    Field denoise(const DenoiseRequest& req) const override;
    Field encode(const Field& image) const override;
    Field decode(const Field& latent) const override;
    std::optional<Field> generate_base(const std::string& condition, std::uint64_t seed, std::size_t height,
                                       std::size_t width) const override;
    /// latent_channels from /v1/health, spatial size divided by kLatentFactor.
    Shape latent_shape(const Shape& image) const override;
    std::string describe() const override;

    static constexpr std::size_t kLatentFactor = 8;

    protocol::Health health() const;
    /// First successful health() answer, fetched on demand.
    protocol::Health cached_health() const;

    /// Raw POST with retries; exposed for protocol tests.
    nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

private:
    struct Pool;
    RemoteConfig config_;
    std::unique_ptr<Pool> pool_;
    mutable std::mutex health_mu_;
    mutable std::optional<protocol::Health> health_;
};

}  // namespace hiwave
