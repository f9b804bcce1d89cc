// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

// JSON/HTTP wire format shared by the remote client and any service that
// speaks it. Tensors travel as base64 of little-endian float32 in
// channel-major order, alongside an explicit [c, h, w] shape.
//
//   POST /v1/denoise        {shape, latent_b64, sigma, condition|null} -> {prediction_b64, shape}
//   POST /v1/encode         {image_b64, shape}                         -> {latent_b64, shape}
//   POST /v1/decode         {latent_b64, shape}                        -> {image_b64, shape}
//   POST /v1/generate_base  {prompt, seed, width, height}              -> {image_b64, shape}
//   GET  /v1/health                                                    -> {status, native_resolution, latent_channels}

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hiwave/field.hpp"

namespace hiwave::protocol {

std::string encode_floats(std::span<const float> values);
/// Throws FormatError on malformed base64 or a length that is not a
/// multiple of four bytes.
std::vector<float> decode_floats(std::string_view b64);

nlohmann::json shape_json(const Shape& s);
Shape shape_from_json(const nlohmann::json& j);

/// Writes {key: base64, "shape": [c, h, w]} into `body`.
void put_field(nlohmann::json& body, const char* key, const Field& f);
/// Reads the field stored under `key`; validates the payload length against
/// "shape".
Field get_field(const nlohmann::json& body, const char* key);

nlohmann::json denoise_request(const Field& latent, double sigma, const std::optional<std::string>& condition);

struct Health {
    std::string status;
    std::size_t native_resolution = 0;
    std::size_t latent_channels = 0;
};

Health health_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Health& h);

}  // namespace hiwave::protocol
