#include "mespec/numeric_text.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "mespec/errors.hpp"

namespace mespec {

namespace {

int significant_span(const std::string& text) {
  int position = 0;
  int first = -1;
  int last = -1;
  for (char c : text) {
    if (c == 'e' || c == 'E') {
      break;
    }
    if (c >= '0' && c <= '9') {
      ++position;
      if (c != '0') {
        if (first < 0) {
          first = position;
        }
        last = position;
      }
    }
  }
  return first < 0 ? 0 : last - first + 1;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  std::string text(buffer, result.ptr);
  // For large integers the character-shortest form spells out the exact
  // value and can exceed 17 significant digits; the digit-shortest
  // scientific form never does.
  if (significant_span(text) > 17) {
    const auto sci =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::scientific);
    text.assign(buffer, sci.ptr);
  }
  return text;
}

double parse_double(std::string_view text) {
  if (text.empty()) {
    throw ValidationError("empty numeric value");
  }
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last) {
    throw ValidationError("invalid numeric value '" + std::string(text) + "'");
  }
  return value;
}

long parse_integer(std::string_view text) {
  if (text.empty()) {
    throw ValidationError("empty integer value");
  }
  long value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last) {
    throw ValidationError("invalid integer value '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") {
    return true;
  }
  if (text == "false" || text == "no" || text == "off" || text == "0") {
    return false;
  }
  throw ValidationError("invalid boolean value '" + std::string(text) + "'");
}

}  // namespace mespec
