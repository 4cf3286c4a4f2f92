#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace distsec::cli {

/// Process exit codes; documented in the README.
enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_usage = 2,        // unknown subcommand/flag, bad flag value
    exit_invalid_input = 3,  // malformed config or code file, failed validation
    exit_cap_exceeded = 4,   // search or joint-state caps
    exit_io = 5,             // file could not be read or written
};

/// Runs one command line (args[0] is the program name). Results go to `out` unless
/// -o names a file; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace distsec::cli
