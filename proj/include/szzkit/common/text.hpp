#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace szzkit {

[[nodiscard]] std::string to_lower(std::string_view s);
[[nodiscard]] std::string to_upper(std::string_view s);
[[nodiscard]] bool iequals(std::string_view a, std::string_view b);
[[nodiscard]] std::string_view trim(std::string_view s);
[[nodiscard]] bool is_alnum(char c);

// Splits on '\n'; a trailing newline does not produce an empty last element.
[[nodiscard]] std::vector<std::string> split_lines(std::string_view text);
[[nodiscard]] std::vector<std::string> split(std::string_view text, char sep);

[[nodiscard]] std::string basename(std::string_view path);
[[nodiscard]] std::string extension(std::string_view path);

// RFC 4180 quoting, applied only when the field needs it.
[[nodiscard]] std::string csv_field(std::string_view field);
[[nodiscard]] std::vector<std::string> parse_csv_line(std::string_view line);

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace szzkit
