// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/remote.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <httplib.h>

#include "hiwave/errors.hpp"

namespace hiwave {

struct RemoteBackend::Pool {
    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::unique_ptr<httplib::Client>> idle;

    std::unique_ptr<httplib::Client> acquire() {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return !idle.empty(); });
        auto c = std::move(idle.back());
        idle.pop_back();
        return c;
    }

    void release(std::unique_ptr<httplib::Client> c) {
        {
            std::lock_guard lock(mu);
            idle.push_back(std::move(c));
        }
        cv.notify_one();
    }
};

namespace {

template <typename Pool>
class ClientLease {
public:
    explicit ClientLease(Pool& pool) : pool_(pool), client_(pool.acquire()) {}
    ~ClientLease() { pool_.release(std::move(client_)); }
    ClientLease(const ClientLease&) = delete;
    ClientLease& operator=(const ClientLease&) = delete;
    httplib::Client& operator*() { return *client_; }

private:
    Pool& pool_;
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)), pool_(std::make_unique<Pool>()) {
    if (config_.pool_size == 0) throw ConfigError("remote backend pool size must be at least 1");
    if (config_.max_retries < 0) throw ConfigError("remote backend retries must be >= 0");
    for (std::size_t i = 0; i < config_.pool_size; ++i) {
        auto c = std::make_unique<httplib::Client>(config_.url);
        if (!c->is_valid()) throw ConfigError(fmt::format("invalid remote url '{}'", config_.url));
        c->set_keep_alive(true);
        c->set_connection_timeout(config_.timeout);
        c->set_read_timeout(config_.timeout);
        c->set_write_timeout(config_.timeout);
        pool_->idle.push_back(std::move(c));
    }
}

RemoteBackend::~RemoteBackend() = default;

nlohmann::json RemoteBackend::post(const std::string& path, const nlohmann::json& body) const {
    const std::string payload = body.dump();
    const int attempts = config_.max_retries + 1;
    auto delay = config_.backoff;
    std::string last_error;
    int last_status = 0;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        httplib::Result res;
        {
            ClientLease<Pool> lease(*pool_);
            res = (*lease).Post(path, payload, "application/json");
        }
        if (!res) {
            last_status = 0;
            last_error = httplib::to_string(res.error());
        } else if (res->status == 200) {
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception& e) {
                throw BackendError(fmt::format("{}: invalid JSON in response: {}", path, e.what()), attempt, 200, false);
            }
        } else {
            last_status = res->status;
            last_error = res->body;
            if (res->status < 500) {
                throw BackendError(fmt::format("{}: HTTP {}: {}", path, res->status, res->body), attempt, res->status, false);
            }
        }
        if (attempt < attempts) {
            std::this_thread::sleep_for(delay);
            delay *= 2;
        }
    }
    throw BackendError(fmt::format("{}: giving up after {} attempts: {}", path, attempts, last_error), attempts,
                       last_status, true);
}

Field RemoteBackend::denoise(const DenoiseRequest& req) const {
    const auto res = post("/v1/denoise", protocol::denoise_request(req.latent, req.sigma, req.condition));
    try {
        return protocol::get_field(res, "prediction_b64");
    } catch (const FormatError& e) {
        throw BackendError(fmt::format("/v1/denoise: {}", e.what()));
    }
}

Field RemoteBackend::encode(const Field& image) const {
    nlohmann::json body;
    protocol::put_field(body, "image_b64", image);
    const auto res = post("/v1/encode", body);
    Field latent = [&] {
        try {
            return protocol::get_field(res, "latent_b64");
        } catch (const FormatError& e) {
            throw BackendError(fmt::format("/v1/encode: {}", e.what()));
        }
    }();
    const auto info = cached_health();
    if (latent.channels() != info.latent_channels) {
        throw BackendError(fmt::format("/v1/encode: latent {} disagrees with health latent_channels={}",
                                       to_string(latent.shape()), info.latent_channels));
    }
    return latent;
}

Field RemoteBackend::decode(const Field& latent) const {
    nlohmann::json body;
    protocol::put_field(body, "latent_b64", latent);
    const auto res = post("/v1/decode", body);
    try {
        return protocol::get_field(res, "image_b64");
    } catch (const FormatError& e) {
        throw BackendError(fmt::format("/v1/decode: {}", e.what()));
    }
}

Shape RemoteBackend::latent_shape(const Shape& image) const {
    return Shape{static_cast<std::size_t>(cached_health().latent_channels), image.height / kLatentFactor,
                 image.width / kLatentFactor};
}

std::optional<Field> RemoteBackend::generate_base(const std::string& condition, std::uint64_t seed, std::size_t height,
                                                  std::size_t width) const {
    const nlohmann::json body = {{"prompt", condition}, {"seed", seed}, {"width", width}, {"height", height}};
    const auto res = post("/v1/generate_base", body);
    try {
        return protocol::get_field(res, "image_b64");
    } catch (const FormatError& e) {
        throw BackendError(fmt::format("/v1/generate_base: {}", e.what()));
    }
}

protocol::Health RemoteBackend::health() const {
    ClientLease<Pool> lease(*pool_);
    auto res = (*lease).Get("/v1/health");
    if (!res) throw BackendError(fmt::format("/v1/health: {}", httplib::to_string(res.error())), 1, 0, true);
    if (res->status != 200) throw BackendError(fmt::format("/v1/health: HTTP {}", res->status), 1, res->status, res->status >= 500);
    try {
        return protocol::health_from_json(nlohmann::json::parse(res->body));
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(fmt::format("/v1/health: {}", e.what()));
    }
}

protocol::Health RemoteBackend::cached_health() const {
    std::lock_guard lock(health_mu_);
    if (!health_) health_ = health();
    return *health_;
}

std::string RemoteBackend::describe() const { return fmt::format("remote({})", config_.url); }

}  // namespace hiwave
