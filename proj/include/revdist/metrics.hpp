#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace revdist {

/// Lowercase tokens with no whitespace; the unit ROUGE operates on.
struct TokenSequence {
    std::vector<std::string> tokens;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }

    bool operator==(const TokenSequence&) const = default;
};

/// Lowercases the text and splits on every maximal run of non-alphanumeric
/// characters. No stemming, no stopwords.
TokenSequence tokenize(std::string_view text);

struct MetricScore {
    std::string metric_name;
    double value = 0.0; // always in [0, 100]
    bool higher_is_better = true;
};

/// N-gram F1 over multisets, scaled to [0,100]. Returns 0 when either
/// sequence has no n-grams. Throws std::invalid_argument for n < 1.
MetricScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n);

/// Longest-common-subsequence F1, scaled to [0,100].
MetricScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference);

} // namespace revdist
