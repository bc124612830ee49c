#pragma once

#include <string>
#include <vector>

namespace ccb::textio {

// Shortest round-trip decimal rendering (std::to_chars); deterministic.
std::string format_double(double value);
// Fixed decimals, for human-facing output matching published tables.
std::string format_fixed(double value, int decimals);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

// RFC-4180 style: quotes fields containing comma/quote/newline.
std::string csv_escape(const std::string& field);
// Parses one CSV record that is already known to end at `line`'s end.
std::vector<std::string> csv_split(const std::string& line);

std::vector<std::string> split(const std::string& text, char sep);
std::string trim(const std::string& text);
std::string lower(std::string text);

} // namespace ccb::textio
