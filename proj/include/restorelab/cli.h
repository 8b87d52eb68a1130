// SPDX-License-Identifier: Apache-2.0

#ifndef RESTORELAB_CLI_H_
#define RESTORELAB_CLI_H_

#include <iosfwd>

namespace restorelab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Subcommands: degrade, build-testset, rir-gen, evaluate, losses,
/// restore-oracle. Returns 0 on success, 1 on a usage error (usage text on
/// `err`), 2 on a runtime error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace restorelab

#endif  // RESTORELAB_CLI_H_
