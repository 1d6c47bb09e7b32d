#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace revdist {

/// One draft under evaluation, with an optional ground-truth reference.
struct CorpusRecord {
    std::string document_id;
    std::string draft;
    std::optional<std::string> reference;
    std::optional<std::string> task_label;

    bool operator==(const CorpusRecord&) const = default;
};

/// One chosen/rejected pair for reference-free agreement runs.
struct PreferencePair {
    std::string pair_id;
    std::optional<std::string> prompt;
    std::string chosen;
    std::string rejected;

    bool operator==(const PreferencePair&) const = default;
};

/// Parses a JSON Lines file of {"document_id", "draft", "reference"?,
/// "task_label"?} records. Order-preserving; duplicate ids, missing keys and
/// empty drafts are FormatErrors naming the line.
std::vector<CorpusRecord> load_reference_corpus(const std::filesystem::path& path);

/// Parses {"pair_id", "prompt"?, "chosen", "rejected"} records under the
/// same rules.
std::vector<PreferencePair> load_preference_corpus(const std::filesystem::path& path);

void save_reference_corpus(const std::filesystem::path& path,
                           std::span<const CorpusRecord> records);
void save_preference_corpus(const std::filesystem::path& path,
                            std::span<const PreferencePair> pairs);

} // namespace revdist
