// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hiwave/field.hpp"
#include "hiwave/kernels.hpp"

namespace hiwave {

enum class WaveletKind { haar, sym4 };

/// Orthonormal two-channel filter bank. Coefficients follow the PyWavelets
/// convention, so reconstruction filters are the time-reversed analysis ones.
struct WaveletFilter {
    WaveletKind kind;
    std::string name;
    std::vector<double> dec_lo;
    std::vector<double> dec_hi;
    std::vector<double> rec_lo;
    std::vector<double> rec_hi;

    std::size_t length() const noexcept { return dec_lo.size(); }

    static const WaveletFilter& haar();
    static const WaveletFilter& sym4();
    /// "haar" or "sym4"; throws ConfigError otherwise.
    static const WaveletFilter& by_name(std::string_view name);
};

using kernels::Boundary;

Boundary boundary_from_string(std::string_view s);
std::string_view to_string(Boundary b);

/// One level of a 2-D DWT. All four bands have the same shape,
/// channels x coeff_len(height) x coeff_len(width): ceil(n/2) under
/// periodization, (n + F - 1)/2 under symmetric extension.
struct WaveletBands {
    Field low;         // approximation along both axes
    Field horizontal;  // detail along height, approximation along width
    Field vertical;    // approximation along height, detail along width
    Field diagonal;    // detail along both axes
    std::size_t source_height = 0;
    std::size_t source_width = 0;
    Boundary boundary = Boundary::periodization;
};

/// Separable one-level analysis, per channel. Throws ShapeError when height or
/// width is below 2.
WaveletBands dwt2(const Field& x, const WaveletFilter& filter, Boundary boundary = Boundary::periodization,
                  kernels::Exec exec = kernels::Exec::parallel);

/// Inverse of dwt2 using the boundary recorded in the bands; output has the
/// recorded source size.
Field idwt2(const WaveletBands& bands, const WaveletFilter& filter, kernels::Exec exec = kernels::Exec::parallel);

/// Recursive decomposition of the low band; element 0 is the finest level.
std::vector<WaveletBands> dwt2_multilevel(const Field& x, const WaveletFilter& filter, std::size_t levels,
                                          Boundary boundary = Boundary::periodization);
Field idwt2_multilevel(std::vector<WaveletBands> levels, const WaveletFilter& filter);

}  // namespace hiwave
