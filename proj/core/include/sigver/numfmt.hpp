#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sigver {

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

/// Strict parse of a full token; throws Error(InvalidArgument) on junk.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

/// Space-separated shortest round-trip decimals.
std::string join_doubles(std::span<const double> values, char sep = ' ');

/// Splits on runs of ASCII whitespace.
std::vector<std::string_view> split_ws(std::string_view line);

}  // namespace sigver
