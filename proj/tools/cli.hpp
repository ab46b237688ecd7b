// Copyright 2026 The cothink Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Kept out of main() so tests can drive it in
// process and inspect exit codes and output.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cothink::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kRuntime = 2,
  kInvariant = 3,
};

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cothink::cli
