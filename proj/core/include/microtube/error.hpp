// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace microtube {

enum class ErrorCode {
    invalid_argument,
    config_mismatch,
    schema,
    io,
    frame_misalignment,
    length_mismatch,
};

/// Stable machine-readable name, used in CLI error reports.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace microtube
