// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace microtube::cli {

/// Runs the `microtube` command line with `args` (program name excluded).
/// Failures are reported on `err` as one JSON object {error, message}.
/// Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace microtube::cli
