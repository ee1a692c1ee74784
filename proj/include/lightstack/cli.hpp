// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry point. Exit codes: 0 success, 2 I/O error, 3 parse
// error in an input file, 4 validation error (including bad flags). Errors
// are reported as a single line on `err`:
//
//   lightstack: error[<kind>]: <message>

#ifndef LIGHTSTACK_CLI_HPP_
#define LIGHTSTACK_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace lightstack {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitValidation = 4;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace lightstack

#endif  // LIGHTSTACK_CLI_HPP_
