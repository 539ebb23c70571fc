#pragma once

#include <iostream>

namespace siqr {

/// Command-line frontend. Exit codes: 0 success, 1 schema/validation
/// errors (including bad usage), 2 run failures.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

} // namespace siqr
