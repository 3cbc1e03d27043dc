#pragma once

#include <ostream>

namespace umbir::cli {

/// Parses argv, runs one subcommand and returns the process exit status.
/// Failures print a single line `error code=<n> kind=<kind> msg="..."` to
/// `err`.
int dispatch(int argc, const char *const *argv, std::ostream &out,
             std::ostream &err);

} // namespace umbir::cli
