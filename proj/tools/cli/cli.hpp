// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hpi::cli {

/// Runs one `hpi` invocation. `args` excludes the program name.
/// Exit codes: 0 ok, 1 usage, 2 data or config, 3 trainer.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hpi::cli
