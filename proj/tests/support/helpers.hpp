// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cmath>
#include <cstdint>

#include "hiwave/denoise.hpp"
#include "hiwave/field.hpp"
#include "hiwave/rng.hpp"

namespace hiwave::testing {

inline Field random_field(Shape shape, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    Field f = gaussian_field(rng, shape);
    for (auto& v : f.values()) v = static_cast<float>(v * scale);
    return f;
}

inline Field uniform_field(Shape shape, std::uint64_t seed, float lo = 0.0f, float hi = 1.0f) {
    Rng rng(seed);
    Field f(shape);
    for (auto& v : f.values()) v = lo + (hi - lo) * static_cast<float>(rng.uniform());
    return f;
}

inline GaussianMixture single_gaussian(const Field& mean, double stddev) {
    return GaussianMixture({MixtureComponent{1.0, mean, stddev}});
}

inline bool bitwise_equal(const Field& a, const Field& b) { return a == b; }

}  // namespace hiwave::testing
