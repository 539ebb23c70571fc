#pragma once

#include <string>

namespace siqr {

/// 17 significant digits (%.17g): enough to round-trip any double.
std::string format_sig17(double v);

/// Shortest decimal form that round-trips the exact double.
std::string format_shortest(double v);

} // namespace siqr
