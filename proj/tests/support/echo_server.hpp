// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

// In-process HTTP server speaking the denoiser protocol. Predictions echo the
// latent scaled by a constant, encode/decode are identities, and failures can
// be injected per request.

#pragma once

#include <atomic>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hiwave/protocol.hpp"

namespace hiwave::testing {

class EchoServer {
public:
    /// Answers the first `failures` POSTs with `failure_status`.
    std::atomic<int> failures{0};
    std::atomic<int> failure_status{503};
    /// Status of every POST when non-zero, regardless of `failures`.
    std::atomic<int> always_status{0};
    std::atomic<int> posts{0};
    float denoise_scale = 0.5f;
    std::size_t latent_channels = 3;

    EchoServer() {
        server_.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(protocol::to_json({"ok", 64, latent_channels}).dump(), "application/json");
        });
        server_.Post("/v1/denoise", [this](const httplib::Request& req, httplib::Response& res) {
            if (inject(res)) return;
            const auto body = nlohmann::json::parse(req.body);
            Field z = protocol::get_field(body, "latent_b64");
            for (auto& v : z.values()) v *= denoise_scale;
            nlohmann::json out;
            protocol::put_field(out, "prediction_b64", z);
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/v1/encode", [this](const httplib::Request& req, httplib::Response& res) {
            if (inject(res)) return;
            nlohmann::json out;
            protocol::put_field(out, "latent_b64", protocol::get_field(nlohmann::json::parse(req.body), "image_b64"));
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/v1/decode", [this](const httplib::Request& req, httplib::Response& res) {
            if (inject(res)) return;
            nlohmann::json out;
            protocol::put_field(out, "image_b64", protocol::get_field(nlohmann::json::parse(req.body), "latent_b64"));
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/v1/generate_base", [this](const httplib::Request& req, httplib::Response& res) {
            if (inject(res)) return;
            const auto body = nlohmann::json::parse(req.body);
            const auto h = body.at("height").get<std::size_t>();
            const auto w = body.at("width").get<std::size_t>();
            Field img(Shape{3, h, w});
            for (std::size_t i = 0; i < img.size(); ++i) img.values()[i] = static_cast<float>(i % 7) / 7.0f;
            nlohmann::json out;
            protocol::put_field(out, "image_b64", img);
            res.set_content(out.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~EchoServer() {
        server_.stop();
        thread_.join();
    }

    EchoServer(const EchoServer&) = delete;
    EchoServer& operator=(const EchoServer&) = delete;

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    bool inject(httplib::Response& res) {
        ++posts;
        int status = always_status.load();
        if (status == 0 && failures.fetch_sub(1) > 0) status = failure_status.load();
        if (status == 0) return false;
        res.status = status;
        res.set_content(R"({"error":"injected"})", "application/json");
        return true;
    }

    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace hiwave::testing
