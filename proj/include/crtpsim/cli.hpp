#pragma once

#include <iosfwd>

namespace crtpsim {

// Exit codes: 0 success, 1 validation error, 2 I/O error, 64 usage error.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace crtpsim
