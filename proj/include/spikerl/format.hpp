#pragma once

#include <string>
#include <string_view>

namespace spikerl {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
// Strict parse of a whole token; throws std::invalid_argument.
double parse_double(std::string_view token);

}  // namespace spikerl
