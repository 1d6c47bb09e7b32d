#include "revdist/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

namespace revdist {

TokenSequence tokenize(std::string_view text) {
    TokenSequence sequence;
    std::string current;
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            sequence.tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        sequence.tokens.push_back(std::move(current));
    }
    return sequence;
}

namespace {

double f1_percent(double overlap, double candidate_total, double reference_total) {
    if (candidate_total <= 0.0 || reference_total <= 0.0) {
        return 0.0;
    }
    double precision = overlap / candidate_total;
    double recall = overlap / reference_total;
    if (precision + recall <= 0.0) {
        return 0.0;
    }
    return 2.0 * precision * recall / (precision + recall) * 100.0;
}

std::map<std::string, std::size_t> ngram_counts(const TokenSequence& sequence, std::size_t n) {
    std::map<std::string, std::size_t> counts;
    if (sequence.size() < n) {
        return counts;
    }
    for (std::size_t i = 0; i + n <= sequence.size(); ++i) {
        std::string key;
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) {
                key.push_back('\x1f');
            }
            key += sequence.tokens[i + j];
        }
        counts[key] += 1;
    }
    return counts;
}

} // namespace

MetricScore rouge_n(const TokenSequence& candidate, const TokenSequence& reference, int n) {
    if (n < 1) {
        throw std::invalid_argument("rouge_n requires n >= 1");
    }
    std::string name = "rouge" + std::to_string(n);

    auto cand_counts = ngram_counts(candidate, static_cast<std::size_t>(n));
    auto ref_counts = ngram_counts(reference, static_cast<std::size_t>(n));

    std::size_t cand_total = 0;
    for (const auto& [key, count] : cand_counts) {
        cand_total += count;
    }
    std::size_t ref_total = 0;
    for (const auto& [key, count] : ref_counts) {
        ref_total += count;
    }

    std::size_t overlap = 0;
    for (const auto& [key, count] : cand_counts) {
        auto it = ref_counts.find(key);
        if (it != ref_counts.end()) {
            overlap += std::min(count, it->second);
        }
    }

    return MetricScore{name,
                       f1_percent(static_cast<double>(overlap), static_cast<double>(cand_total),
                                  static_cast<double>(ref_total)),
                       true};
}

MetricScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
    const std::size_t m = candidate.size();
    const std::size_t n = reference.size();
    if (m == 0 || n == 0) {
        return MetricScore{"rougeL", 0.0, true};
    }

    // Two-row LCS table.
    std::vector<std::size_t> prev(n + 1, 0);
    std::vector<std::size_t> curr(n + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            if (candidate.tokens[i - 1] == reference.tokens[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    double lcs = static_cast<double>(prev[n]);

    return MetricScore{"rougeL",
                       f1_percent(lcs, static_cast<double>(m), static_cast<double>(n)), true};
}

} // namespace revdist
