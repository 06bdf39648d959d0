// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace merawav {

/// Entry point shared by the binary and the CLI tests. Returns the process
/// exit code: 0 success, 2 configuration error, 3 data error, 4 numerical
/// failure.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace merawav
