// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#include "hiwave/errors.hpp"

#include <fmt/format.h>

namespace hiwave {

namespace {

std::string locate(const std::string& inner, int stage, int patch, int step) {
    std::string where = fmt::format("stage {}", stage);
    if (patch >= 0) where += fmt::format(", patch {}", patch);
    if (step >= 0) where += fmt::format(", step {}", step);
    return fmt::format("{}: {}", where, inner);
}

}  // namespace

StepError::StepError(const std::string& inner, int step)
    : Error(fmt::format("step {}: {}", step, inner)), inner_(inner), step_(step) {}

PipelineError::PipelineError(const std::string& inner, int stage, int patch, int step)
    : Error(locate(inner, stage, patch, step)), stage_(stage), patch_(patch), step_(step) {}

}  // namespace hiwave
