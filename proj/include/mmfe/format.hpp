#pragma once

#include <string>

namespace mmfe {

// Locale-independent numeric formatting ('.' decimal separator, no grouping).

// 17 significant digits; round-trips any double bit-exactly.
std::string format_double(double v);

// Shortest representation that round-trips.
std::string format_shortest(double v);

}  // namespace mmfe
