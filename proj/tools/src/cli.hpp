// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace aqua::cli {

// Entry point shared by the binary and the test suites. `args` excludes
// the program name. Returns the process exit code: 0 success, 2 flag
// errors, 3 I/O or file-format errors, 4 numeric failures.
int run(std::vector<std::string> args);
int run(int argc, const char* const* argv);

}  // namespace aqua::cli
