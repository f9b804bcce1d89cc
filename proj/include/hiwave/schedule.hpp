// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace hiwave {

enum class ScheduleKind { karras_rho7, linear_sigma };

ScheduleKind schedule_kind_from_string(std::string_view s);
std::string_view to_string(ScheduleKind k);

struct ScheduleParams {
    ScheduleKind kind = ScheduleKind::karras_rho7;
    std::size_t steps = 50;
    double sigma_min = 0.002;
    double sigma_max = 80.0;
};

/// Noise levels sigma_0 > ... > sigma_{N-1} = sigma_min > sigma_N = 0.
/// Sampling walks the list forwards, inversion walks it backwards.
class NoiseSchedule {
public:
    const std::vector<double>& sigmas() const noexcept { return sigmas_; }
    std::size_t step_count() const noexcept { return sigmas_.size() - 1; }
    double sigma(std::size_t i) const { return sigmas_.at(i); }
    double sigma_max() const noexcept { return sigmas_.front(); }
    double sigma_min() const noexcept { return sigmas_[sigmas_.size() - 2]; }

private:
    friend NoiseSchedule build_schedule(const ScheduleParams& p);
    std::vector<double> sigmas_;
};

/// Throws ConfigError unless steps >= 1 and 0 < sigma_min < sigma_max.
NoiseSchedule build_schedule(const ScheduleParams& p);

}  // namespace hiwave
