// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <png.h>

#include "hiwave/errors.hpp"
#include "hiwave/imaging.hpp"

namespace hiwave {

namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode), &std::fclose);
    if (!f) throw IoError(fmt::format("cannot open '{}'", path.string()));
    return f;
}

std::uint16_t quantize16(float v) { return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 65535.0f)); }

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    auto* text = static_cast<std::string*>(png_get_error_ptr(png));
    *text = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

// libpng reports errors through longjmp, so nothing with a destructor may be
// live between setjmp and the calls that can fail. Buffers are owned by the
// caller and only raw pointers are used inside.
struct PngRead {
    std::uint32_t width = 0, height = 0;
    int channels = 0;
    std::vector<std::uint16_t> samples;
};

bool read_png_raw(std::FILE* fp, PngRead& out, std::string& error) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
    if (!png) {
        error = "out of memory";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    std::vector<png_bytep>* rows = nullptr;
    std::vector<png_byte>* buffer = nullptr;
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        delete rows;
        delete buffer;
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_alpha(png);
    if (png_get_bit_depth(png, info) == 16) png_set_swap(png);  // host little-endian samples
    png_read_update_info(png, info);

    out.width = png_get_image_width(png, info);
    out.height = png_get_image_height(png, info);
    out.channels = png_get_channels(png, info);
    const int depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer = new std::vector<png_byte>(rowbytes * out.height);
    rows = new std::vector<png_bytep>(out.height);
    for (std::uint32_t y = 0; y < out.height; ++y) (*rows)[y] = buffer->data() + y * rowbytes;
    png_read_image(png, rows->data());
    png_read_end(png, nullptr);

    const std::size_t count = static_cast<std::size_t>(out.width) * out.height * static_cast<std::size_t>(out.channels);
    out.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (depth == 16) {
            out.samples[i] = static_cast<std::uint16_t>((*buffer)[2 * i] | ((*buffer)[2 * i + 1] << 8));
        } else {
            out.samples[i] = static_cast<std::uint16_t>((*buffer)[i] * 257);
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    delete rows;
    delete buffer;
    return true;
}

ImageBuffer from_interleaved(std::size_t channels, std::size_t height, std::size_t width,
                             const std::vector<std::uint16_t>& samples) {
    Field f(Shape{channels, height, width});
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            for (std::size_t c = 0; c < channels; ++c) {
                f.at(c, y, x) = static_cast<float>(samples[(y * width + x) * channels + c]) / 65535.0f;
            }
        }
    }
    return ImageBuffer(std::move(f));
}

ImageBuffer load_png(const std::filesystem::path& path) {
    auto fp = open_file(path, "rb");
    PngRead raw;
    std::string error;
    if (!read_png_raw(fp.get(), raw, error)) throw FormatError(fmt::format("corrupt PNG '{}': {}", path.string(), error));
    std::size_t channels = static_cast<std::size_t>(raw.channels);
    if (channels == 2) channels = 1;  // gray + alpha after strip is already 1, kept for safety
    if (channels != 1 && channels != 3) {
        throw FormatError(fmt::format("unsupported PNG channel count {} in '{}'", raw.channels, path.string()));
    }
    return from_interleaved(channels, raw.height, raw.width, raw.samples);
}

bool write_png_raw(std::FILE* fp, const ImageBuffer& img, const std::vector<png_byte>& buffer, std::string& error) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
    if (!png) {
        error = "out of memory";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, info ? &info : nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 16,
                 img.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t rowbytes = img.width() * img.channels() * 2;
    for (std::size_t y = 0; y < img.height(); ++y) {
        png_write_row(png, const_cast<png_bytep>(buffer.data() + y * rowbytes));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

void save_png(const ImageBuffer& img, const std::filesystem::path& path) {
    const Field& f = img.pixels();
    std::vector<png_byte> buffer(img.height() * img.width() * img.channels() * 2);
    std::size_t k = 0;
    for (std::size_t y = 0; y < img.height(); ++y) {
        for (std::size_t x = 0; x < img.width(); ++x) {
            for (std::size_t c = 0; c < img.channels(); ++c) {
                const std::uint16_t q = quantize16(f.at(c, y, x));
                buffer[k++] = static_cast<png_byte>(q >> 8);  // PNG is big-endian
                buffer[k++] = static_cast<png_byte>(q & 0xff);
            }
        }
    }
    auto fp = open_file(path, "wb");
    std::string error;
    if (!write_png_raw(fp.get(), img, buffer, error)) {
        throw IoError(fmt::format("failed to write PNG '{}': {}", path.string(), error));
    }
    if (std::fflush(fp.get()) != 0) throw IoError(fmt::format("failed to write '{}'", path.string()));
}

// Binary PNM (P5 gray, P6 RGB) with maxval up to 65535.
ImageBuffer load_pnm(const std::filesystem::path& path, const std::vector<unsigned char>& data) {
    std::size_t pos = 2;
    auto next_int = [&]() -> std::size_t {
        while (pos < data.size()) {
            if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(data[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        std::size_t v = 0;
        std::size_t digits = 0;
        while (pos < data.size() && std::isdigit(data[pos])) {
            v = v * 10 + static_cast<std::size_t>(data[pos++] - '0');
            if (++digits > 9) throw FormatError(fmt::format("corrupt PNM header in '{}'", path.string()));
        }
        if (digits == 0) throw FormatError(fmt::format("corrupt PNM header in '{}'", path.string()));
        return v;
    };
    const std::size_t channels = data[1] == '6' ? 3 : 1;
    const std::size_t width = next_int();
    const std::size_t height = next_int();
    const std::size_t maxval = next_int();
    ++pos;  // single whitespace before the raster
    if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
        throw FormatError(fmt::format("corrupt PNM header in '{}'", path.string()));
    }
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    const std::size_t count = width * height * channels;
    if (data.size() < pos || data.size() - pos < count * bytes) {
        throw FormatError(fmt::format("truncated PNM raster in '{}'", path.string()));
    }
    std::vector<std::uint16_t> samples(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t v = bytes == 2 ? (data[pos + 2 * i] << 8) | data[pos + 2 * i + 1] : data[pos + i];
        samples[i] = static_cast<std::uint16_t>(std::lround(static_cast<double>(v) * 65535.0 / static_cast<double>(maxval)));
    }
    return from_interleaved(channels, height, width, samples);
}

void save_pnm(const ImageBuffer& img, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError(fmt::format("cannot open '{}'", path.string()));
    os << (img.channels() == 3 ? "P6" : "P5") << '\n' << img.width() << ' ' << img.height() << "\n65535\n";
    const Field& f = img.pixels();
    for (std::size_t y = 0; y < img.height(); ++y) {
        for (std::size_t x = 0; x < img.width(); ++x) {
            for (std::size_t c = 0; c < img.channels(); ++c) {
                const std::uint16_t q = quantize16(f.at(c, y, x));
                os.put(static_cast<char>(q >> 8));
                os.put(static_cast<char>(q & 0xff));
            }
        }
    }
    if (!os) throw IoError(fmt::format("failed to write '{}'", path.string()));
}

}  // namespace

ImageBuffer load_image(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::array<unsigned char, 8> sig{};
    is.read(reinterpret_cast<char*>(sig.data()), sig.size());
    const auto got = static_cast<std::size_t>(is.gcount());
    if (got == 8 && png_sig_cmp(sig.data(), 0, 8) == 0) {
        is.close();
        return load_png(path);
    }
    if (got >= 2 && sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) {
        is.clear();
        is.seekg(0);
        std::vector<unsigned char> data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        return load_pnm(path, data);
    }
    throw FormatError(fmt::format("'{}' is not a PNG or binary PGM/PPM image", path.string()));
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
    if (path.empty()) throw IoError("save_image: empty path");
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
        save_pnm(img, path);
    } else {
        save_png(img, path);
    }
}

}  // namespace hiwave
