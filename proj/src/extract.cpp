#include "revdist/extract.hpp"

#include <cctype>
#include <optional>

#include <json.hpp>

#include "revdist/errors.hpp"
#include "revdist/kv_file.hpp"

namespace revdist {

namespace {

using ordered_json = nlohmann::ordered_json;

/// Returns the body of the first ``` fenced block, if any. An optional
/// language tag after the opening fence is skipped.
std::optional<std::string_view> fenced_body(std::string_view text) {
    std::size_t open = text.find("```");
    if (open == std::string_view::npos) {
        return std::nullopt;
    }
    std::size_t body_start = open + 3;
    std::size_t line_end = text.find('\n', body_start);
    if (line_end == std::string_view::npos) {
        return std::nullopt;
    }
    // Anything between the fence and the newline is a language tag.
    body_start = line_end + 1;
    std::size_t close = text.find("```", body_start);
    if (close == std::string_view::npos) {
        return text.substr(body_start);
    }
    return text.substr(body_start, close - body_start);
}

/// Walks a balanced JSON value starting at text[start] ('[' or '{'),
/// respecting strings and escapes. Returns one past the end, or npos when
/// the value never closes.
std::size_t end_of_balanced_value(std::string_view text, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        switch (c) {
            case '"': in_string = true; break;
            case '[':
            case '{': ++depth; break;
            case ']':
            case '}':
                --depth;
                if (depth == 0) {
                    return i + 1;
                }
                if (depth < 0) {
                    return std::string_view::npos;
                }
                break;
            default: break;
        }
    }
    return std::string_view::npos;
}

/// Drops a comma whose next non-whitespace character closes its container.
std::string strip_trailing_commas(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            out.push_back(c);
            if (c == '\\' && i + 1 < text.size()) {
                out.push_back(text[++i]);
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
            out.push_back(c);
            continue;
        }
        if (c == ',') {
            std::size_t j = i + 1;
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) {
                ++j;
            }
            if (j < text.size() && (text[j] == ']' || text[j] == '}')) {
                continue; // swallow the trailing comma
            }
        }
        out.push_back(c);
    }
    return out;
}

std::optional<ordered_json> try_parse(std::string_view text) {
    std::string cleaned = strip_trailing_commas(text);
    ordered_json parsed = ordered_json::parse(cleaned, nullptr, false);
    if (parsed.is_discarded()) {
        return std::nullopt;
    }
    return parsed;
}

/// Finds the array the response carries: the first top-level array, else
/// the first array-valued field of the first top-level object that has one.
std::optional<ordered_json> locate_edit_array(std::string_view text) {
    std::optional<ordered_json> fallback_from_object;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t start = text.find_first_of("[{", pos);
        if (start == std::string_view::npos) {
            break;
        }
        std::size_t end = end_of_balanced_value(text, start);
        if (end == std::string_view::npos) {
            pos = start + 1;
            continue;
        }
        auto parsed = try_parse(text.substr(start, end - start));
        if (!parsed.has_value()) {
            pos = start + 1;
            continue;
        }
        if (parsed->is_array()) {
            return parsed;
        }
        if (parsed->is_object() && !fallback_from_object.has_value()) {
            for (const auto& [key, value] : parsed->items()) {
                if (value.is_array()) {
                    fallback_from_object = value;
                    break;
                }
            }
        }
        pos = end;
    }
    return fallback_from_object;
}

std::string field_as_string(const ordered_json& element, const char* name) {
    if (!element.contains(name) || element.at(name).is_null()) {
        return "";
    }
    const auto& value = element.at(name);
    if (value.is_string()) {
        return value.get<std::string>();
    }
    return value.dump(); // tolerate numbers and the like
}

} // namespace

ExtractionResult extract_structured_edits(std::string_view raw) {
    std::string_view text = raw;
    if (auto body = fenced_body(raw)) {
        text = *body;
    }

    std::optional<ordered_json> array = locate_edit_array(text);
    if (!array.has_value()) {
        throw ParseError("no JSON array of edits could be recovered from the response");
    }

    ExtractionResult result;
    std::size_t index = 0;
    for (const auto& element : *array) {
        ++index;
        if (!element.is_object()) {
            result.dropped.push_back("element " + std::to_string(index) +
                                     " is not a JSON object");
            continue;
        }
        RevisionEdit edit;
        edit.action_name = trim_copy(field_as_string(element, "action_name"));
        edit.revision_description = field_as_string(element, "revision_description");
        edit.revision_level = field_as_string(element, "revision_level");
        edit.revision_intention = field_as_string(element, "revision_intention");
        edit.original_snippet = field_as_string(element, "original_snippet");
        edit.revised_snippet = field_as_string(element, "revised_snippet");

        if (edit.action_name.empty()) {
            result.dropped.push_back("element " + std::to_string(index) +
                                     " is missing action_name");
            continue;
        }
        if (edit.original_snippet.empty() && edit.revised_snippet.empty()) {
            result.dropped.push_back("element " + std::to_string(index) +
                                     " has neither an original nor a revised snippet");
            continue;
        }
        result.edits.push_back(std::move(edit));
    }
    return result;
}

} // namespace revdist
