// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/protocol.hpp"

#include <bit>
#include <cstring>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "hiwave/errors.hpp"

namespace hiwave::protocol {

std::string encode_floats(std::span<const float> values) {
    static_assert(std::endian::native == std::endian::little, "wire format assumes a little-endian host");
    const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
    const std::size_t n = values.size_bytes();
    std::string out(4 * ((n + 2) / 3), '\0');
    const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes, static_cast<int>(n));
    out.resize(static_cast<std::size_t>(written));
    return out;
}

std::vector<float> decode_floats(std::string_view b64) {
    if (b64.size() % 4 != 0) throw FormatError("base64 payload length is not a multiple of 4");
    std::vector<unsigned char> buf(3 * (b64.size() / 4));
    const int n = EVP_DecodeBlock(buf.data(), reinterpret_cast<const unsigned char*>(b64.data()),
                                  static_cast<int>(b64.size()));
    if (n < 0) throw FormatError("malformed base64 payload");
    std::size_t len = static_cast<std::size_t>(n);
    // EVP_DecodeBlock counts padding as zero bytes.
    if (!b64.empty() && b64.back() == '=') --len;
    if (b64.size() >= 2 && b64[b64.size() - 2] == '=') --len;
    if (len % sizeof(float) != 0) throw FormatError(fmt::format("decoded payload of {} bytes is not float32 data", len));
    std::vector<float> out(len / sizeof(float));
    std::memcpy(out.data(), buf.data(), len);
    return out;
}

nlohmann::json shape_json(const Shape& s) { return nlohmann::json::array({s.channels, s.height, s.width}); }

Shape shape_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw FormatError("shape must be an array [c, h, w]");
    for (const auto& v : j) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) throw FormatError("shape entries must be positive integers");
    }
    return Shape{j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>()};
}

void put_field(nlohmann::json& body, const char* key, const Field& f) {
    body[key] = encode_floats(f.values());
    body["shape"] = shape_json(f.shape());
}

Field get_field(const nlohmann::json& body, const char* key) {
    if (!body.is_object() || !body.contains(key) || !body[key].is_string()) {
        throw FormatError(fmt::format("response is missing string field '{}'", key));
    }
    if (!body.contains("shape")) throw FormatError("response is missing 'shape'");
    const Shape shape = shape_from_json(body["shape"]);
    auto values = decode_floats(body[key].get<std::string>());
    if (values.size() != shape.size()) {
        throw FormatError(fmt::format("'{}' carries {} floats, shape {} needs {}", key, values.size(), to_string(shape),
                                      shape.size()));
    }
    return Field(shape, std::move(values));
}

nlohmann::json denoise_request(const Field& latent, double sigma, const std::optional<std::string>& condition) {
    nlohmann::json body;
    put_field(body, "latent_b64", latent);
    body["sigma"] = sigma;
    body["condition"] = condition ? nlohmann::json(*condition) : nlohmann::json(nullptr);
    return body;
}

Health health_from_json(const nlohmann::json& j) {
    try {
        return Health{j.at("status").get<std::string>(), j.at("native_resolution").get<std::size_t>(),
                      j.at("latent_channels").get<std::size_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("malformed health response: {}", e.what()));
    }
}

nlohmann::json to_json(const Health& h) {
    return {{"status", h.status}, {"native_resolution", h.native_resolution}, {"latent_channels", h.latent_channels}};
}

}  // namespace hiwave::protocol
