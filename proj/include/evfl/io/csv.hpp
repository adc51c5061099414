#pragma once

#include <string>
#include <vector>

namespace evfl::io {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Splits one CSV line on commas (no quoting; the formats written and read
/// by this project never contain embedded commas).
std::vector<std::string> split_csv_line(const std::string& line);

/// Strict double parse of a full field; returns false on any trailing junk.
bool parse_double(const std::string& field, double& out);

}  // namespace evfl::io
