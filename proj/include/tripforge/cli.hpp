#pragma once

#include <iosfwd>

namespace tripforge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

/// Entry point of the `tripforge` executable. Subcommands: synth, ingest,
/// analyze, train, ablate, predict. Output that is not written to files goes
/// to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tripforge
