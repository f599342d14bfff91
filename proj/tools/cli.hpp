// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trivergence::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kIo = 2,
    kInvalidDistribution = 3,
    kInternal = 4,
};

/// Runs one invocation. `args` excludes the program name. Reports go to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal with `digits` significant digits (general notation).
/// 17 digits reproduce any double exactly.
std::string format_number(double v, int digits);

}  // namespace trivergence::cli
