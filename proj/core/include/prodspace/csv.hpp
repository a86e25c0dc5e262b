#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace prodspace::csv {

/// Splits one line on `delim`, honouring double-quoted fields ("" escapes a quote).
std::vector<std::string> split_line(std::string_view line, char delim);

/// Quotes a field if it contains the delimiter, a quote or a newline.
std::string escape_field(std::string_view field, char delim = ',');

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Strict decimal parse of the whole field; returns false on trailing junk.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename so readers never see half a file.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace prodspace::csv
