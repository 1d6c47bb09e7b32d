#include "revdist/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "revdist/errors.hpp"

namespace revdist {

namespace {

using nlohmann::json;

json parse_line(const std::string& line, std::size_t line_no) {
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
        throw FormatError("invalid JSON", line_no);
    }
    if (!record.is_object()) {
        throw FormatError("record is not a JSON object", line_no);
    }
    return record;
}

std::string required_string(const json& record, const char* key, std::size_t line_no) {
    if (!record.contains(key)) {
        throw FormatError(std::string("missing required key \"") + key + "\"", line_no);
    }
    const auto& value = record.at(key);
    if (!value.is_string()) {
        throw FormatError(std::string("key \"") + key + "\" must be a string", line_no);
    }
    std::string text = value.get<std::string>();
    if (text.empty()) {
        throw FormatError(std::string("key \"") + key + "\" must be non-empty", line_no);
    }
    return text;
}

std::optional<std::string> optional_string(const json& record, const char* key,
                                           std::size_t line_no) {
    if (!record.contains(key) || record.at(key).is_null()) {
        return std::nullopt;
    }
    if (!record.at(key).is_string()) {
        throw FormatError(std::string("key \"") + key + "\" must be a string", line_no);
    }
    return record.at(key).get<std::string>();
}

bool blank_line(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

const std::string& record_id(const CorpusRecord& record) { return record.document_id; }
const std::string& record_id(const PreferencePair& pair) { return pair.pair_id; }

template <typename Record, typename ParseFn>
std::vector<Record> load_jsonl(const std::filesystem::path& path, ParseFn parse) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open corpus " + path.string());
    }
    std::vector<Record> records;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank_line(line)) {
            continue;
        }
        Record record = parse(parse_line(line, line_no), line_no);
        const std::string& id = record_id(record);
        if (!seen_ids.insert(id).second) {
            throw FormatError("duplicate id \"" + id + "\"", line_no);
        }
        records.push_back(std::move(record));
    }
    return records;
}

void write_optional(json& record, const char* key, const std::optional<std::string>& value) {
    if (value.has_value()) {
        record[key] = *value;
    }
}

} // namespace

std::vector<CorpusRecord> load_reference_corpus(const std::filesystem::path& path) {
    return load_jsonl<CorpusRecord>(path, [](const json& record, std::size_t line_no) {
        CorpusRecord out;
        out.document_id = required_string(record, "document_id", line_no);
        out.draft = required_string(record, "draft", line_no);
        out.reference = optional_string(record, "reference", line_no);
        out.task_label = optional_string(record, "task_label", line_no);
        return out;
    });
}

std::vector<PreferencePair> load_preference_corpus(const std::filesystem::path& path) {
    return load_jsonl<PreferencePair>(path, [](const json& record, std::size_t line_no) {
        PreferencePair out;
        out.pair_id = required_string(record, "pair_id", line_no);
        out.prompt = optional_string(record, "prompt", line_no);
        out.chosen = required_string(record, "chosen", line_no);
        out.rejected = required_string(record, "rejected", line_no);
        return out;
    });
}

void save_reference_corpus(const std::filesystem::path& path,
                           std::span<const CorpusRecord> records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write corpus " + path.string());
    }
    for (const CorpusRecord& record : records) {
        json line = {{"document_id", record.document_id}, {"draft", record.draft}};
        write_optional(line, "reference", record.reference);
        write_optional(line, "task_label", record.task_label);
        out << line.dump() << '\n';
    }
}

void save_preference_corpus(const std::filesystem::path& path,
                            std::span<const PreferencePair> pairs) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write corpus " + path.string());
    }
    for (const PreferencePair& pair : pairs) {
        json line = {{"pair_id", pair.pair_id}, {"chosen", pair.chosen},
                     {"rejected", pair.rejected}};
        write_optional(line, "prompt", pair.prompt);
        out << line.dump() << '\n';
    }
}

} // namespace revdist
