#pragma once

#include <iosfwd>

namespace hep {

// Exit statuses: 0 success, 1 runtime or config error, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hep
