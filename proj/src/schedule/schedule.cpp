// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/schedule.hpp"

#include <cmath>

#include <fmt/format.h>

#include "hiwave/errors.hpp"

namespace hiwave {

ScheduleKind schedule_kind_from_string(std::string_view s) {
    if (s == "karras_rho7" || s == "karras") return ScheduleKind::karras_rho7;
    if (s == "linear_sigma" || s == "linear") return ScheduleKind::linear_sigma;
    throw ConfigError(fmt::format("unknown schedule '{}' (expected karras_rho7 or linear_sigma)", s));
}

std::string_view to_string(ScheduleKind k) {
    return k == ScheduleKind::karras_rho7 ? "karras_rho7" : "linear_sigma";
}

NoiseSchedule build_schedule(const ScheduleParams& p) {
    if (p.steps < 1) throw ConfigError("schedule needs at least one step");
    if (!(p.sigma_min > 0.0) || !(p.sigma_min < p.sigma_max) || !std::isfinite(p.sigma_max)) {
        throw ConfigError(fmt::format("schedule needs 0 < sigma_min < sigma_max, got [{}, {}]", p.sigma_min, p.sigma_max));
    }
    NoiseSchedule s;
    s.sigmas_.reserve(p.steps + 1);
    if (p.steps == 1) {
        s.sigmas_ = {p.sigma_max, 0.0};
        return s;
    }
    constexpr double rho = 7.0;
    const double inv_max = std::pow(p.sigma_max, 1.0 / rho);
    const double inv_min = std::pow(p.sigma_min, 1.0 / rho);
    const auto last = static_cast<double>(p.steps - 1);
    for (std::size_t i = 0; i < p.steps; ++i) {
        const double r = static_cast<double>(i) / last;
        if (i == 0) {
            s.sigmas_.push_back(p.sigma_max);
        } else if (i + 1 == p.steps) {
            s.sigmas_.push_back(p.sigma_min);
        } else if (p.kind == ScheduleKind::karras_rho7) {
            s.sigmas_.push_back(std::pow(inv_max + r * (inv_min - inv_max), rho));
        } else {
            s.sigmas_.push_back(p.sigma_max + r * (p.sigma_min - p.sigma_max));
        }
    }
    s.sigmas_.push_back(0.0);
    return s;
}

}  // namespace hiwave
