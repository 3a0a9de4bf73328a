#pragma once

#include <iosfwd>

#include "clk/config.hpp"

namespace clk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitHypothesisWarning = 2;

// Executes a validated configuration, writing artifacts under cfg.out and
// manifest.txt in every case. Returns the process exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command-line entry point (subcommands, --config, CLK_SEED, flags).
int main(int argc, char** argv);

}  // namespace clk::cli
