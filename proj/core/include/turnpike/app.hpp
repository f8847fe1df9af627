#pragma once

#include <iosfwd>
#include <string>

#include "turnpike/config.hpp"
#include "turnpike/outputs.hpp"

namespace turnpike {

// Exit codes of the command dispatcher.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNoConvergence = 2;
inline constexpr int kExitValidation = 3;

// Runs one validated command and writes its artifacts to
// config.run.output_dir.  Summary lines go to `out`.
// Throws the usual library errors on failure.
void run_command(const RunConfig& config, std::ostream& out);

// Full CLI entry: parses arguments, loads the config, applies the
// TURNPIKE_OUT override and maps errors to exit codes.
int cli_main(int argc, char** argv);

}  // namespace turnpike
