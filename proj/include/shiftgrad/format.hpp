#pragma once

#include <string>

namespace shiftgrad {

/// Shortest representation that round-trips to the same double. Locale independent.
std::string format_shortest(double value);

/// printf("%.15g") with a '.' decimal point regardless of locale.
std::string format_g15(double value);

/// Locale-independent strict parse of a whole token; throws std::invalid_argument.
double parse_double(const std::string& token);
long long parse_integer(const std::string& token);

}  // namespace shiftgrad
