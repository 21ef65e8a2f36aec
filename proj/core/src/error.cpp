// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/error.hpp"

namespace microtube {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::config_mismatch: return "config_mismatch";
    case ErrorCode::schema: return "schema";
    case ErrorCode::io: return "io";
    case ErrorCode::frame_misalignment: return "frame_misalignment";
    case ErrorCode::length_mismatch: return "length_mismatch";
    }
    return "unknown";
}

}  // namespace microtube
