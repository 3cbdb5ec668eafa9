#pragma once

#include <iosfwd>

namespace cruc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point for `cruc run|stats|synth`. Reports go to `out`, diagnostics
/// and per-cell progress to `err`.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cruc::cli
