#include "mespec/structured_text.hpp"

#include <cctype>
#include <sstream>

#include "mespec/errors.hpp"

namespace mespec {

std::string trim_copy(std::string_view text) {
  std::size_t lo = 0;
  std::size_t hi = text.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(text[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(text[hi - 1]))) --hi;
  return std::string(text.substr(lo, hi - lo));
}

std::vector<std::string> split_list(const std::string& text, char separator) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream stream(text);
  while (std::getline(stream, item, separator)) {
    out.push_back(trim_copy(item));
  }
  return out;
}

SectionMap parse_structured_text(const std::string& text) {
  SectionMap sections;
  std::string current;
  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) {
      line.erase(comment);
    }
    const std::string body = trim_copy(line);
    if (body.empty()) {
      continue;
    }
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw ValidationError("malformed section header at line " + std::to_string(line_number));
      }
      current = trim_copy(body.substr(1, body.size() - 2));
      if (current.empty()) {
        throw ValidationError("empty section name at line " + std::to_string(line_number));
      }
      sections.try_emplace(current);
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("expected key = value at line " + std::to_string(line_number));
    }
    if (current.empty()) {
      throw ValidationError("key outside any section at line " + std::to_string(line_number));
    }
    const std::string key = trim_copy(body.substr(0, eq));
    const std::string value = trim_copy(body.substr(eq + 1));
    if (key.empty()) {
      throw ValidationError("empty key at line " + std::to_string(line_number));
    }
    auto [it, inserted] = sections[current].emplace(key, value);
    if (!inserted) {
      throw ValidationError("duplicate key '" + current + "." + key + "'");
    }
  }
  return sections;
}

}  // namespace mespec
