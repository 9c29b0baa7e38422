#pragma once

#include <ostream>

namespace tnpath {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;     // verify: path does not match the network
inline constexpr int kExitMalformed = 2;   // unreadable or malformed input, bad arguments
inline constexpr int kExitInfeasible = 3;  // search budget or generation retries exhausted

/// Entry point of the `tnpath` tool: optimize, gen, verify, bench.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tnpath
