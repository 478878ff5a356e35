#pragma once

#include <map>
#include <string>
#include <vector>

namespace mespec {

// Section -> key -> value view of the structured text format shared by the
// config file, the spectrum file and the verification report. '#' and ';'
// start comments; duplicate keys are rejected.
using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_structured_text(const std::string& text);

std::string trim_copy(std::string_view text);
std::vector<std::string> split_list(const std::string& text, char separator);

}  // namespace mespec
