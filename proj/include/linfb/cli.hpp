#pragma once

#include <iosfwd>

namespace linfb {

// Exit codes: 0 success, 1 verification failure, 2 usage or validation error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace linfb
