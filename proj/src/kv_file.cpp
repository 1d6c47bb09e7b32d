#include "revdist/kv_file.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "revdist/errors.hpp"

namespace revdist {

std::string trim_copy(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) {
        --end;
    }
    return std::string(text.substr(begin, end - begin));
}

std::string to_lower_copy(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::vector<std::string> split_comma_list(std::string_view value) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        std::string_view piece = comma == std::string_view::npos
                                     ? value.substr(start)
                                     : value.substr(start, comma - start);
        std::string trimmed = trim_copy(piece);
        if (!trimmed.empty()) {
            parts.push_back(std::move(trimmed));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return parts;
}

std::vector<KeyValueEntry> parse_key_value_text(std::string_view text) {
    std::vector<KeyValueEntry> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::string trimmed = trim_copy(line);
        if (trimmed.empty()) {
            continue;
        }
        std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw FormatError("expected 'key = value', got \"" + trimmed + "\"", line_no);
        }
        KeyValueEntry entry;
        entry.key = to_lower_copy(trim_copy(trimmed.substr(0, eq)));
        entry.value = trim_copy(trimmed.substr(eq + 1));
        entry.line = line_no;
        if (entry.key.empty()) {
            throw FormatError("empty key", line_no);
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<KeyValueEntry> parse_key_value_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_key_value_text(buffer.str());
}

} // namespace revdist
