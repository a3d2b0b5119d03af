#pragma once

#include <ostream>

namespace uds::cli {

/// Runs one command line. Exit codes: 0 success, 1 check failure, 2 I/O,
/// usage or configuration error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uds::cli
