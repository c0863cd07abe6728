#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xlsent {

std::vector<std::string_view> split_whitespace(std::string_view line);
std::vector<std::string> split_tokens(std::string_view line);
std::string_view trim(std::string_view s);
std::optional<double> parse_double(std::string_view s);
std::optional<std::size_t> parse_size(std::string_view s);
// Shortest decimal text that parses back to the same double.
std::string format_exact(double value);
std::string format_fixed(double value, int digits);

}  // namespace xlsent
