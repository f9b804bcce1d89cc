// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "hiwave/field.hpp"

namespace hiwave {

/// Seeded generator. The bit stream is std::mt19937_64, which the standard
/// specifies exactly. Uniforms take the top 53 bits; normals come from the
/// Box-Muller transform in double. No std:: distribution is involved, so the
/// stream does not depend on the standard library vendor.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform();
    double normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// I.i.d. standard normal entries in channel-major order.
Field gaussian_field(Rng& rng, Shape shape);

}  // namespace hiwave
