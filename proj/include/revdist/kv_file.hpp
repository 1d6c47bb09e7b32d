#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace revdist {

struct KeyValueEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Parses a flat "key = value" file. '#' starts a comment, blank lines are
/// skipped, keys are lowercased, values keep their inner spacing. Throws
/// IoError / FormatError.
std::vector<KeyValueEntry> parse_key_value_file(const std::filesystem::path& path);

std::vector<KeyValueEntry> parse_key_value_text(std::string_view text);

/// Splits "a, b, c" into trimmed non-empty pieces.
std::vector<std::string> split_comma_list(std::string_view value);

std::string trim_copy(std::string_view text);
std::string to_lower_copy(std::string_view text);

} // namespace revdist
