#pragma once

#include <iosfwd>

namespace blpp {

// Entry point behind the blpp tool; split out for in-process testing.
// Exit codes: 0 success, 2 parameter error, 3 infeasible geometry,
// 4 statistics error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Compact oracle suite behind `blpp selftest`; returns the failure count.
int run_selftest(std::ostream& out);

} // namespace blpp
