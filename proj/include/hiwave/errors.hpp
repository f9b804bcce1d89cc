// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

#pragma once

#include <stdexcept>
#include <string>

namespace hiwave {

/// Base class for every error raised by the engine. Messages are
/// human-readable and carry whatever context (shapes, paths, stage/step
/// indices) was available where the failure happened.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

/// Raised by backends. `attempts` is how many tries were made before giving
/// up; `status` is the last HTTP status seen (0 for transport failures or
/// non-remote backends).
class BackendError : public Error {
public:
    BackendError(const std::string& what, int attempts = 1, int status = 0, bool retryable = false)
        : Error(what), attempts_(attempts), status_(status), retryable_(retryable) {}

    int attempts() const noexcept { return attempts_; }
    int status() const noexcept { return status_; }
    bool retryable() const noexcept { return retryable_; }

private:
    int attempts_;
    int status_;
    bool retryable_;
};

/// Failure inside one step of a sampling or inversion loop. The original
/// exception is nested (std::throw_with_nested) and keeps its metadata.
class StepError : public Error {
public:
    StepError(const std::string& inner, int step);

    const std::string& inner() const noexcept { return inner_; }
    int step() const noexcept { return step_; }

private:
    std::string inner_;
    int step_;
};

/// Failure inside a pipeline stage, located by stage, patch and step
/// (-1 when not applicable). The original exception is nested.
class PipelineError : public Error {
public:
    PipelineError(const std::string& inner, int stage, int patch = -1, int step = -1);

    int stage() const noexcept { return stage_; }
    int patch() const noexcept { return patch_; }
    int step() const noexcept { return step_; }

private:
    int stage_;
    int patch_;
    int step_;
};

}  // namespace hiwave
