#pragma once

#include <iosfwd>

namespace wgls {

/// Command line entry point. Exit codes: 0 success, 1 numerical or I/O failure, 2 usage error.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace wgls
