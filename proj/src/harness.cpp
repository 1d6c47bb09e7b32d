#include "revdist/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "revdist/errors.hpp"
#include "revdist/gpt_score.hpp"
#include "revdist/grounding.hpp"
#include "revdist/metrics.hpp"
#include "revdist/proxy.hpp"

namespace revdist {

std::string_view to_string(RunMode mode) {
    return mode == RunMode::reference_based ? "reference_based" : "reference_free";
}

std::string_view to_string(TiePolicy policy) {
    switch (policy) {
        case TiePolicy::count_as_disagreement: return "count_as_disagreement";
        case TiePolicy::count_as_half: return "count_as_half";
        case TiePolicy::exclude: return "exclude";
    }
    return "count_as_disagreement";
}

std::optional<RunMode> run_mode_from_string(std::string_view name) {
    if (name == "reference_based") return RunMode::reference_based;
    if (name == "reference_free") return RunMode::reference_free;
    return std::nullopt;
}

std::optional<TiePolicy> tie_policy_from_string(std::string_view name) {
    if (name == "count_as_disagreement") return TiePolicy::count_as_disagreement;
    if (name == "count_as_half") return TiePolicy::count_as_half;
    if (name == "exclude") return TiePolicy::exclude;
    return std::nullopt;
}

const std::set<std::string>& known_metrics() {
    static const std::set<std::string> metrics = {"revision_distance", "rouge1", "rouge2",
                                                  "rougeL", "gpt_score"};
    return metrics;
}

bool lower_is_better(const std::string& metric) { return metric == "revision_distance"; }

std::string metric_display_name(const std::string& metric) {
    if (metric == "revision_distance") return "D_Revision";
    if (metric == "rouge1") return "ROUGE-1";
    if (metric == "rouge2") return "ROUGE-2";
    if (metric == "rougeL") return "ROUGE-L";
    if (metric == "gpt_score") return "GPT-Score";
    return metric;
}

void RunConfig::validate() const {
    if (metrics.empty()) {
        throw ConfigError("no metrics requested");
    }
    for (const std::string& metric : metrics) {
        if (!known_metrics().contains(metric)) {
            throw ConfigError("unknown metric \"" + metric + "\"");
        }
    }
    if (mode == RunMode::reference_free) {
        for (const std::string& metric : metrics) {
            if (metric.rfind("rouge", 0) == 0) {
                throw ConfigError("metric \"" + metric + "\" needs a reference; "
                                  "it is unavailable in reference_free mode");
            }
        }
        if (!metrics.contains("revision_distance") && !metrics.contains("gpt_score")) {
            throw ConfigError(
                "reference_free mode requires revision_distance or gpt_score");
        }
    }
    if (worker_count < 1) {
        throw ConfigError("worker_count must be at least 1");
    }
    if (max_edits < 1) {
        throw ConfigError("max_edits must be at least 1");
    }
}

namespace {

ReportContext make_context(const RunConfig& config, const PromptLibrary& library) {
    ReportContext context;
    context.mode = config.mode;
    context.metrics = config.metrics;
    context.model_name = config.backend.model_name;
    context.temperature = config.backend.temperature;
    context.tie_policy = config.tie_policy;
    context.template_version = library.version();
    context.max_edits = config.max_edits;
    return context;
}

/// Runs f(0..n-1) on up to `workers` threads. Indices are handed out
/// atomically; results land wherever f puts them, keyed by index, so the
/// outcome is schedule-independent.
template <typename Fn>
void parallel_for(std::size_t n, int workers, bool fail_fast, Fn f) {
    if (n == 0) {
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto body = [&] {
        for (;;) {
            if (stop.load()) {
                return;
            }
            std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                if (fail_fast) {
                    stop.store(true);
                }
            }
        }
    };

    std::size_t thread_count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    if (thread_count <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (std::size_t t = 0; t < thread_count; ++t) {
            pool.emplace_back(body);
        }
        for (std::thread& thread : pool) {
            thread.join();
        }
    }
    if (fail_fast && first_error) {
        std::rethrow_exception(first_error);
    }
}

struct DocumentOutcome {
    bool ok = false;
    DocumentEval eval;
    std::string error;
    int parse_retries = 0;
    bool truncated = false;
    int dropped = 0;
};

DocumentOutcome evaluate_one(const CorpusRecord& record, const RunConfig& config,
                             LLMBackend& backend, const PromptLibrary& library) {
    DocumentOutcome outcome;
    std::optional<std::string> task_hint =
        record.task_label.has_value() ? record.task_label : config.default_task_hint;
    std::optional<std::string> reference =
        config.mode == RunMode::reference_based ? record.reference : std::nullopt;

    std::vector<RevisionEdit> edits;
    if (config.metrics.contains("revision_distance")) {
        GenerationOptions options;
        options.reference = reference;
        options.task_hint = task_hint;
        options.max_edits = config.max_edits;
        GenerationResult generated =
            generate_revision_edits(backend, library, record.document_id, record.draft, options);
        edits = std::move(generated.edits);
        outcome.parse_retries += generated.diagnostics.parse_retries;
        outcome.truncated = generated.diagnostics.truncated;
        outcome.dropped = static_cast<int>(generated.diagnostics.dropped.size());
    }

    outcome.eval =
        evaluate_document(record.document_id, record.draft, edits, config.keywords);

    if (record.reference.has_value()) {
        TokenSequence candidate = tokenize(record.draft);
        TokenSequence reference_tokens = tokenize(*record.reference);
        if (config.metrics.contains("rouge1")) {
            outcome.eval.baseline_scores["rouge1"] =
                rouge_n(candidate, reference_tokens, 1).value;
        }
        if (config.metrics.contains("rouge2")) {
            outcome.eval.baseline_scores["rouge2"] =
                rouge_n(candidate, reference_tokens, 2).value;
        }
        if (config.metrics.contains("rougeL")) {
            outcome.eval.baseline_scores["rougeL"] = rouge_l(candidate, reference_tokens).value;
        }
    }
    if (config.metrics.contains("gpt_score")) {
        GptScoreResult scored =
            run_gpt_score(backend, library, record.draft, reference, task_hint,
                          record.document_id);
        outcome.eval.baseline_scores["gpt_score"] = scored.score.value;
        outcome.parse_retries += scored.parse_retries;
    }

    outcome.ok = true;
    return outcome;
}

int count_ungrounded(const DocumentEval& eval) {
    int count = 0;
    for (const GroundedEdit& edit : eval.edits) {
        if (!edit.grounded) {
            ++count;
        }
    }
    return count;
}

} // namespace

RunReport evaluate_corpus(std::span<const CorpusRecord> records, const RunConfig& config,
                          LLMBackend& backend, const PromptLibrary& library) {
    config.validate();
    bool needs_reference = config.mode == RunMode::reference_based &&
                           (config.metrics.contains("revision_distance") ||
                            config.metrics.contains("rouge1") ||
                            config.metrics.contains("rouge2") ||
                            config.metrics.contains("rougeL"));
    if (needs_reference) {
        for (const CorpusRecord& record : records) {
            if (!record.reference.has_value()) {
                throw ConfigError("document \"" + record.document_id +
                                  "\" has no reference; reference_based " +
                                  "revision_distance and ROUGE need one");
            }
        }
    }

    std::vector<DocumentOutcome> outcomes(records.size());
    parallel_for(records.size(), config.worker_count, config.fail_fast, [&](std::size_t i) {
        try {
            outcomes[i] = evaluate_one(records[i], config, backend, library);
        } catch (const std::exception& e) {
            outcomes[i].ok = false;
            outcomes[i].error = e.what();
            if (config.fail_fast) {
                throw;
            }
        }
    });

    RunReport report;
    report.context = make_context(config, library);
    report.corpus_size = records.size();

    double distance_sum = 0.0;
    std::map<EditCategory, double> category_sums;
    for (EditCategory category : kAllCategories) {
        category_sums[category] = 0.0;
    }
    std::map<std::string, double> baseline_sums;

    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        DocumentOutcome& outcome = outcomes[i];
        if (!outcome.ok) {
            report.diagnostics.failed_documents.push_back(
                {records[i].document_id, outcome.error});
            continue;
        }
        report.diagnostics.parse_retries += outcome.parse_retries;
        report.diagnostics.truncated_documents += outcome.truncated ? 1 : 0;
        report.diagnostics.dropped_elements += outcome.dropped;
        report.diagnostics.ungrounded_edits += count_ungrounded(outcome.eval);

        distance_sum += static_cast<double>(outcome.eval.revision_distance);
        for (const auto& [category, count] : outcome.eval.category_counts) {
            category_sums[category] += static_cast<double>(count);
        }
        for (const auto& [metric, value] : outcome.eval.baseline_scores) {
            baseline_sums[metric] += value;
        }
        report.documents.push_back(std::move(outcome.eval));
    }

    const double evaluated = static_cast<double>(report.documents.size());
    if (evaluated > 0) {
        if (config.metrics.contains("revision_distance")) {
            report.mean_revision_distance = distance_sum / evaluated;
            for (const auto& [category, sum] : category_sums) {
                report.mean_category_counts[category] = sum / evaluated;
            }
        }
        for (const auto& [metric, sum] : baseline_sums) {
            report.mean_baselines[metric] = sum / evaluated;
        }
    }
    return report;
}

ComparisonReport compare_runs(const RunReport& weak, const RunReport& strong) {
    auto collect = [](const RunReport& report) {
        std::map<std::string, double> values;
        if (report.mean_revision_distance.has_value()) {
            values["revision_distance"] = *report.mean_revision_distance;
        }
        for (const auto& [metric, value] : report.mean_baselines) {
            values[metric] = value;
        }
        return values;
    };
    std::map<std::string, double> weak_values = collect(weak);
    std::map<std::string, double> strong_values = collect(strong);

    auto keys_of = [](const std::map<std::string, double>& values) {
        std::string joined;
        for (const auto& [key, value] : values) {
            joined += joined.empty() ? key : ", " + key;
        }
        return joined.empty() ? std::string("(none)") : joined;
    };
    {
        bool mismatch = weak_values.size() != strong_values.size();
        if (!mismatch) {
            for (const auto& [metric, value] : weak_values) {
                if (!strong_values.contains(metric)) {
                    mismatch = true;
                    break;
                }
            }
        }
        if (mismatch) {
            throw ConfigError("metric sets differ: weak has [" + keys_of(weak_values) +
                              "], strong has [" + keys_of(strong_values) + "]");
        }
    }

    ComparisonReport comparison;
    for (const auto& [metric, weak_value] : weak_values) {
        MetricComparison entry;
        entry.weak_value = weak_value;
        entry.strong_value = strong_values.at(metric);

        // Weak-denominator convention throughout; the sign is oriented so
        // that positive always means the strong model did better.
        double delta = lower_is_better(metric) ? weak_value - entry.strong_value
                                               : entry.strong_value - weak_value;
        if (weak_value == 0.0) {
            entry.relative_change_percent = std::nullopt;
            entry.direction = delta == 0.0 ? ChangeDirection::unchanged
                                           : ChangeDirection::undefined;
        } else {
            double change = delta / weak_value * 100.0;
            entry.relative_change_percent = change;
            if (change > 0.0) {
                entry.direction = ChangeDirection::improvement;
            } else if (change < 0.0) {
                entry.direction = ChangeDirection::decline;
            } else {
                entry.direction = ChangeDirection::unchanged;
            }
        }
        comparison.metrics[metric] = entry;
    }
    return comparison;
}

std::string_view to_string(ChangeDirection direction) {
    switch (direction) {
        case ChangeDirection::improvement: return "improvement";
        case ChangeDirection::decline: return "decline";
        case ChangeDirection::unchanged: return "unchanged";
        case ChangeDirection::undefined: return "undefined";
    }
    return "unchanged";
}

std::optional<ChangeDirection> change_direction_from_string(std::string_view name) {
    for (ChangeDirection direction :
         {ChangeDirection::improvement, ChangeDirection::decline, ChangeDirection::unchanged,
          ChangeDirection::undefined}) {
        if (name == to_string(direction)) {
            return direction;
        }
    }
    return std::nullopt;
}

std::string_view to_string(PairResult result) {
    switch (result) {
        case PairResult::agree: return "agree";
        case PairResult::disagree: return "disagree";
        case PairResult::tie: return "tie";
    }
    return "tie";
}

std::optional<PairResult> pair_result_from_string(std::string_view name) {
    for (PairResult result : {PairResult::agree, PairResult::disagree, PairResult::tie}) {
        if (name == to_string(result)) {
            return result;
        }
    }
    return std::nullopt;
}

AgreementReport run_preference_agreement(std::span<const PreferencePair> pairs,
                                         const RunConfig& config, LLMBackend& backend,
                                         const PromptLibrary& library) {
    if (config.mode != RunMode::reference_free) {
        throw ConfigError("preference agreement requires reference_free mode");
    }
    config.validate();

    struct PairEval {
        bool ok = false;
        PairOutcome outcome;
        std::string error;
        int parse_retries = 0;
        bool truncated = false;
        int dropped = 0;
    };
    std::vector<PairEval> evals(pairs.size());

    parallel_for(pairs.size(), config.worker_count, config.fail_fast, [&](std::size_t i) {
        const PreferencePair& pair = pairs[i];
        PairEval& eval = evals[i];
        try {
            GenerationOptions options;
            options.task_hint = pair.prompt.has_value() ? pair.prompt : config.default_task_hint;
            options.max_edits = config.max_edits;

            GenerationResult chosen = generate_revision_edits(
                backend, library, pair.pair_id + "/chosen", pair.chosen, options);
            GenerationResult rejected = generate_revision_edits(
                backend, library, pair.pair_id + "/rejected", pair.rejected, options);

            eval.outcome.pair_id = pair.pair_id;
            eval.outcome.chosen_distance = count_revision_distance(chosen.edits);
            eval.outcome.rejected_distance = count_revision_distance(rejected.edits);
            if (eval.outcome.chosen_distance < eval.outcome.rejected_distance) {
                eval.outcome.result = PairResult::agree;
            } else if (eval.outcome.chosen_distance > eval.outcome.rejected_distance) {
                eval.outcome.result = PairResult::disagree;
            } else {
                eval.outcome.result = PairResult::tie;
            }
            eval.parse_retries =
                chosen.diagnostics.parse_retries + rejected.diagnostics.parse_retries;
            eval.truncated = chosen.diagnostics.truncated || rejected.diagnostics.truncated;
            eval.dropped = static_cast<int>(chosen.diagnostics.dropped.size() +
                                            rejected.diagnostics.dropped.size());
            eval.ok = true;
        } catch (const std::exception& e) {
            eval.ok = false;
            eval.error = e.what();
            if (config.fail_fast) {
                throw;
            }
        }
    });

    AgreementReport report;
    report.context = make_context(config, library);
    report.corpus_size = pairs.size();

    for (std::size_t i = 0; i < evals.size(); ++i) {
        PairEval& eval = evals[i];
        if (!eval.ok) {
            report.diagnostics.failed_documents.push_back({pairs[i].pair_id, eval.error});
            continue;
        }
        report.diagnostics.parse_retries += eval.parse_retries;
        report.diagnostics.truncated_documents += eval.truncated ? 1 : 0;
        report.diagnostics.dropped_elements += eval.dropped;
        if (eval.outcome.result == PairResult::agree) {
            ++report.agreements;
        } else if (eval.outcome.result == PairResult::tie) {
            ++report.ties;
        }
        report.pairs.push_back(std::move(eval.outcome));
    }
    report.total_pairs = report.pairs.size();

    double denominator = static_cast<double>(report.total_pairs);
    double credit = static_cast<double>(report.agreements);
    switch (config.tie_policy) {
        case TiePolicy::count_as_disagreement:
            break;
        case TiePolicy::count_as_half:
            credit += 0.5 * static_cast<double>(report.ties);
            break;
        case TiePolicy::exclude:
            denominator -= static_cast<double>(report.ties);
            break;
    }
    if (denominator > 0.0) {
        report.agreement_rate = credit / denominator;
    }
    return report;
}

} // namespace revdist
