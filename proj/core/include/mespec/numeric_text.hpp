#pragma once

#include <string>
#include <string_view>

namespace mespec {

// Shortest decimal that parses back to the same double, at most 17
// significant digits. All file formats use this representation.
std::string format_double(double value);

// Strict parse of a full token; throws ValidationError otherwise.
double parse_double(std::string_view text);
long parse_integer(std::string_view text);
bool parse_bool(std::string_view text);

}  // namespace mespec
