// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hiwave/errors.hpp"

namespace hiwave {

namespace {

// sym4 decomposition low-pass, PyWavelets ordering.
constexpr double kSym4Lo[8] = {
    -0.07576571478927333, -0.02963552764599851, 0.49761866763201545, 0.8037387518059161,
    0.29785779560527736,  -0.09921954357684722, -0.012603967262037833, 0.0322231006040427,
};

// Builds the orthonormal bank from a decomposition low-pass:
// dec_hi[k] = (-1)^(k+1) lo[F-1-k], rec_* = reversed dec_*.
WaveletFilter make_orthogonal(WaveletKind kind, std::string name, std::vector<double> lo) {
    const std::size_t f = lo.size();
    std::vector<double> hi(f);
    for (std::size_t k = 0; k < f; ++k) hi[k] = ((k % 2 == 0) ? -1.0 : 1.0) * lo[f - 1 - k];
    std::vector<double> rec_lo(lo.rbegin(), lo.rend());
    std::vector<double> rec_hi(hi.rbegin(), hi.rend());
    return WaveletFilter{kind, std::move(name), std::move(lo), std::move(hi), std::move(rec_lo), std::move(rec_hi)};
}

kernels::FilterPair dec_pair(const WaveletFilter& f) { return {f.dec_lo, f.dec_hi}; }

}  // namespace

const WaveletFilter& WaveletFilter::haar() {
    static const WaveletFilter f = make_orthogonal(WaveletKind::haar, "haar", {M_SQRT1_2, M_SQRT1_2});
    return f;
}

const WaveletFilter& WaveletFilter::sym4() {
    static const WaveletFilter f = make_orthogonal(WaveletKind::sym4, "sym4", {std::begin(kSym4Lo), std::end(kSym4Lo)});
    return f;
}

const WaveletFilter& WaveletFilter::by_name(std::string_view name) {
    if (name == "haar") return haar();
    if (name == "sym4") return sym4();
    throw ConfigError(fmt::format("unknown wavelet '{}' (expected haar or sym4)", name));
}

Boundary boundary_from_string(std::string_view s) {
    if (s == "periodization") return Boundary::periodization;
    if (s == "symmetric") return Boundary::symmetric;
    throw ConfigError(fmt::format("unknown wavelet boundary '{}' (expected periodization or symmetric)", s));
}

std::string_view to_string(Boundary b) { return b == Boundary::periodization ? "periodization" : "symmetric"; }

WaveletBands dwt2(const Field& x, const WaveletFilter& filter, Boundary boundary, kernels::Exec exec) {
    const std::size_t c = x.channels();
    const std::size_t h = x.height();
    const std::size_t w = x.width();
    if (h < 2 || w < 2) throw ShapeError(fmt::format("dwt2: input {} must be at least 2x2", to_string(x.shape())));

    const std::size_t f = filter.length();
    const std::size_t mh = kernels::dwt_coeff_len(h, f, boundary);
    const std::size_t mw = kernels::dwt_coeff_len(w, f, boundary);

    std::vector<float> row_lo(c * h * mw);
    std::vector<float> row_hi(c * h * mw);
    const Shape band_shape{c, mh, mw};
    WaveletBands b{Field(band_shape), Field(band_shape), Field(band_shape), Field(band_shape), h, w, boundary};
    const auto dec = dec_pair(filter);

    if (exec == kernels::Exec::serial) {
        kernels::serial::dwt_analyze_rows(x.values(), c, h, w, dec, boundary, row_lo, row_hi);
        kernels::serial::dwt_analyze_cols(row_lo, c, h, mw, dec, boundary, b.low.values(), b.horizontal.values());
        kernels::serial::dwt_analyze_cols(row_hi, c, h, mw, dec, boundary, b.vertical.values(), b.diagonal.values());
    } else {
        kernels::omp::dwt_analyze_rows(x.values(), c, h, w, dec, boundary, row_lo, row_hi);
        kernels::omp::dwt_analyze_cols(row_lo, c, h, mw, dec, boundary, b.low.values(), b.horizontal.values());
        kernels::omp::dwt_analyze_cols(row_hi, c, h, mw, dec, boundary, b.vertical.values(), b.diagonal.values());
    }
    return b;
}

Field idwt2(const WaveletBands& b, const WaveletFilter& filter, kernels::Exec exec) {
    const Shape& s = b.low.shape();
    require_same_shape(s, b.horizontal.shape(), "idwt2");
    require_same_shape(s, b.vertical.shape(), "idwt2");
    require_same_shape(s, b.diagonal.shape(), "idwt2");
    const std::size_t f = filter.length();
    const std::size_t h = b.source_height;
    const std::size_t w = b.source_width;
    const Boundary bd = b.boundary;
    if (h < 2 || w < 2 || kernels::dwt_coeff_len(h, f, bd) != s.height || kernels::dwt_coeff_len(w, f, bd) != s.width) {
        throw ShapeError(fmt::format("idwt2: bands {} inconsistent with source size {}x{} for {}", to_string(s), h, w,
                                     filter.name));
    }
    const std::size_t c = s.channels;
    const std::size_t mh = s.height;
    const std::size_t mw = s.width;

    std::vector<float> row_lo(c * h * mw);
    std::vector<float> row_hi(c * h * mw);
    Field out(Shape{c, h, w});
    const auto dec = dec_pair(filter);
    if (exec == kernels::Exec::serial) {
        kernels::serial::dwt_synthesize_cols(b.low.values(), b.horizontal.values(), c, mh, mw, dec, bd, h, row_lo);
        kernels::serial::dwt_synthesize_cols(b.vertical.values(), b.diagonal.values(), c, mh, mw, dec, bd, h, row_hi);
        kernels::serial::dwt_synthesize_rows(row_lo, row_hi, c, h, mw, dec, bd, w, out.values());
    } else {
        kernels::omp::dwt_synthesize_cols(b.low.values(), b.horizontal.values(), c, mh, mw, dec, bd, h, row_lo);
        kernels::omp::dwt_synthesize_cols(b.vertical.values(), b.diagonal.values(), c, mh, mw, dec, bd, h, row_hi);
        kernels::omp::dwt_synthesize_rows(row_lo, row_hi, c, h, mw, dec, bd, w, out.values());
    }
    return out;
}

std::vector<WaveletBands> dwt2_multilevel(const Field& x, const WaveletFilter& filter, std::size_t levels,
                                          Boundary boundary) {
    if (levels == 0) throw ConfigError("dwt2_multilevel: need at least one level");
    std::vector<WaveletBands> out;
    out.push_back(dwt2(x, filter, boundary));
    while (out.size() < levels) out.push_back(dwt2(out.back().low, filter, boundary));
    return out;
}

Field idwt2_multilevel(std::vector<WaveletBands> levels, const WaveletFilter& filter) {
    if (levels.empty()) throw ConfigError("idwt2_multilevel: no levels");
    for (std::size_t j = levels.size() - 1; j > 0; --j) levels[j - 1].low = idwt2(levels[j], filter);
    return idwt2(levels.front(), filter);
}

}  // namespace hiwave
