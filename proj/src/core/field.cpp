// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/field.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "hiwave/errors.hpp"
#include "hiwave/kernels.hpp"

namespace hiwave {

namespace {

constexpr std::array<char, 8> kMagic = {'F', 'L', 'D', 'F', '0', '0', '0', '1'};

void validate(const Shape& s) {
    if (s.channels == 0 || s.height == 0 || s.width == 0) {
        throw ShapeError(fmt::format("field shape must be positive, got {}", to_string(s)));
    }
}

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
    return v;
}

void write_u32(std::ostream& os, std::uint32_t v) {
    v = to_le(v);
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return to_le(v);
}

// Float payload as little-endian bytes.
std::vector<unsigned char> payload_bytes(const Field& f) {
    std::vector<unsigned char> bytes(f.size() * sizeof(float));
    std::memcpy(bytes.data(), f.values().data(), bytes.size());
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < bytes.size(); i += 4) {
            std::swap(bytes[i], bytes[i + 3]);
            std::swap(bytes[i + 1], bytes[i + 2]);
        }
    }
    return bytes;
}

}  // namespace

std::string to_string(const Shape& s) {
    return fmt::format("({}, {}, {})", s.channels, s.height, s.width);
}

Field::Field(Shape shape) : shape_(shape) {
    validate(shape_);
    values_.assign(shape_.size(), 0.0f);
}

Field::Field(Shape shape, float fill) : shape_(shape) {
    validate(shape_);
    values_.assign(shape_.size(), fill);
}

Field::Field(Shape shape, std::vector<float> values) : shape_(shape), values_(std::move(values)) {
    validate(shape_);
    if (values_.size() != shape_.size()) {
        throw ShapeError(fmt::format("field {} needs {} values, got {}", to_string(shape_), shape_.size(),
                                     values_.size()));
    }
}

std::span<const float> Field::channel(std::size_t c) const {
    if (c >= shape_.channels) throw ShapeError(fmt::format("channel {} out of range for {}", c, to_string(shape_)));
    return std::span<const float>(values_).subspan(c * shape_.plane(), shape_.plane());
}

std::span<float> Field::channel(std::size_t c) {
    if (c >= shape_.channels) throw ShapeError(fmt::format("channel {} out of range for {}", c, to_string(shape_)));
    return std::span<float>(values_).subspan(c * shape_.plane(), shape_.plane());
}

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
    if (!(a == b)) {
        throw ShapeError(fmt::format("{}: shape mismatch {} vs {}", op, to_string(a), to_string(b)));
    }
}

void require_finite(const Field& f, const char* op) {
    for (float v : f.values()) {
        if (!std::isfinite(v)) throw NumericError(fmt::format("{}: non-finite value in field {}", op, to_string(f.shape())));
    }
}

Field axpy(float a, const Field& x, const Field& y) {
    return lincomb(a, x, 1.0f, y);
}

Field lincomb(float a, const Field& x, float b, const Field& y) {
    require_same_shape(x.shape(), y.shape(), "lincomb");
    Field out(x.shape());
    kernels::omp::lincomb(a, x.values(), b, y.values(), out.values());
    require_finite(out, "lincomb");
    return out;
}

Field scaled(const Field& x, float a) {
    Field out(x.shape());
    auto src = x.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = a * src[i];
    require_finite(out, "scaled");
    return out;
}

float max_abs_diff(const Field& a, const Field& b) {
    require_same_shape(a.shape(), b.shape(), "max_abs_diff");
    float m = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

std::string content_hash(const Field& f) {
    const auto bytes = payload_bytes(f);
    const std::array<std::uint32_t, 3> dims = {to_le(static_cast<std::uint32_t>(f.channels())),
                                               to_le(static_cast<std::uint32_t>(f.height())),
                                               to_le(static_cast<std::uint32_t>(f.width()))};
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, dims.data(), sizeof dims);
    EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
    EVP_DigestFinal_ex(ctx, digest.data(), &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

void save_field(const Field& f, const std::filesystem::path& path) {
    if (path.empty()) throw IoError("save_field: empty path");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(fmt::format("save_field: cannot open '{}' for writing", path.string()));
    os.write(kMagic.data(), kMagic.size());
    write_u32(os, static_cast<std::uint32_t>(f.channels()));
    write_u32(os, static_cast<std::uint32_t>(f.height()));
    write_u32(os, static_cast<std::uint32_t>(f.width()));
    const auto bytes = payload_bytes(f);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError(fmt::format("save_field: write to '{}' failed", path.string()));
}

Field load_field(const std::filesystem::path& path) {
    if (path.empty()) throw IoError("load_field: empty path");
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(fmt::format("load_field: cannot open '{}'", path.string()));
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw FormatError(fmt::format("load_field: '{}' is not a field file", path.string()));
    Shape shape;
    shape.channels = read_u32(is);
    shape.height = read_u32(is);
    shape.width = read_u32(is);
    if (!is) throw FormatError(fmt::format("load_field: '{}' has a truncated header", path.string()));
    if (shape.size() == 0) throw FormatError(fmt::format("load_field: '{}' declares empty shape {}", path.string(), to_string(shape)));

    const auto header = static_cast<std::uintmax_t>(kMagic.size() + 12);
    const auto expected = header + static_cast<std::uintmax_t>(shape.size()) * sizeof(float);
    std::error_code ec;
    const auto actual = std::filesystem::file_size(path, ec);
    if (ec || actual != expected) {
        throw FormatError(fmt::format("load_field: '{}' has {} bytes, shape {} needs {}", path.string(), actual,
                                      to_string(shape), expected));
    }
    std::vector<float> values(shape.size());
    is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(float)));
    if (!is) throw FormatError(fmt::format("load_field: '{}' payload truncated", path.string()));
    if constexpr (std::endian::native == std::endian::big) {
        for (auto& v : values) {
            auto u = std::bit_cast<std::uint32_t>(v);
            v = std::bit_cast<float>(to_le(u));
        }
    }
    Field f(shape, std::move(values));
    require_finite(f, "load_field");
    return f;
}

}  // namespace hiwave
