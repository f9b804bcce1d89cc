// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/rng.hpp"

#include <cmath>
#include <numbers>

namespace hiwave {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
}

Field gaussian_field(Rng& rng, Shape shape) {
    Field f(shape);
    for (auto& v : f.values()) v = static_cast<float>(rng.normal());
    return f;
}

}  // namespace hiwave
