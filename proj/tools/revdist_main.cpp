// revdist: revision-distance evaluation CLI.
//
// Subcommands: evaluate, compare, agree, rouge, replay-record.
// Exit codes: 0 success, 1 configuration error, 2 evaluation failures
// above the configured threshold.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "revdist/backend.hpp"
#include "revdist/corpus.hpp"
#include "revdist/errors.hpp"
#include "revdist/harness.hpp"
#include "revdist/kv_file.hpp"
#include "revdist/live_backend.hpp"
#include "revdist/metrics.hpp"
#include "revdist/report.hpp"

namespace {

using namespace revdist;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitEvalFailures = 2;

struct CliOptions {
    std::string corpus_path;
    std::string config_path;
    std::string output_path; // empty = stdout
    std::string format;      // "", "json", "markdown"
    std::string backend_kind = "replay";
    std::string transcript_path;
    std::string templates_dir;
    std::string keywords_path;
    std::string mode;
    std::string metrics;
    std::string model;
    std::string tie_policy;
    std::string task_hint;
    std::string timestamp; // injectable; omitted when empty
    std::optional<double> temperature;
    std::optional<int> workers;
    std::optional<int> max_retries;
    std::optional<int> max_concurrent;
    std::optional<int> rate_limit;
    std::optional<int> max_edits;
    std::optional<bool> fail_fast;
    std::optional<double> failure_threshold; // fraction of failed documents
};

/// Applies config-file values first, then CLI flags on top.
struct ResolvedRun {
    RunConfig run;
    std::string backend_kind = "replay";
    std::string transcript_path;
    std::string templates_dir;
    double failure_threshold = 0.0;
};

void apply_config_file(ResolvedRun& resolved, const std::string& path) {
    for (const KeyValueEntry& entry : parse_key_value_file(path)) {
        const std::string& key = entry.key;
        const std::string& value = entry.value;
        if (key == "mode") {
            auto mode = run_mode_from_string(value);
            if (!mode) {
                throw ConfigError("unknown mode \"" + value + "\" in " + path);
            }
            resolved.run.mode = *mode;
        } else if (key == "metrics") {
            resolved.run.metrics.clear();
            for (const std::string& metric : split_comma_list(value)) {
                resolved.run.metrics.insert(metric);
            }
        } else if (key == "model") {
            resolved.run.backend.model_name = value;
        } else if (key == "temperature") {
            resolved.run.backend.temperature = std::stod(value);
        } else if (key == "max_retries") {
            resolved.run.backend.max_retries = std::stoi(value);
        } else if (key == "max_concurrent") {
            resolved.run.backend.max_concurrent = std::stoi(value);
        } else if (key == "rate_limit_per_min") {
            resolved.run.backend.rate_limit_per_min = std::stoi(value);
        } else if (key == "worker_count") {
            resolved.run.worker_count = std::stoi(value);
        } else if (key == "tie_policy") {
            auto policy = tie_policy_from_string(value);
            if (!policy) {
                throw ConfigError("unknown tie_policy \"" + value + "\" in " + path);
            }
            resolved.run.tie_policy = *policy;
        } else if (key == "max_edits") {
            resolved.run.max_edits = static_cast<std::size_t>(std::stoul(value));
        } else if (key == "fail_fast") {
            resolved.run.fail_fast = (value == "true" || value == "1" || value == "yes");
        } else if (key == "task_hint") {
            resolved.run.default_task_hint = value;
        } else if (key == "keywords_file") {
            resolved.run.keywords = CategoryKeywords::from_file(value);
        } else if (key == "backend") {
            resolved.backend_kind = value;
        } else if (key == "transcript") {
            resolved.transcript_path = value;
        } else if (key == "templates_dir") {
            resolved.templates_dir = value;
        } else if (key == "failure_threshold") {
            resolved.failure_threshold = std::stod(value);
        } else {
            throw ConfigError("unknown config key \"" + key + "\" in " + path);
        }
    }
}

ResolvedRun resolve_run(const CliOptions& options) {
    ResolvedRun resolved;
    if (!options.config_path.empty()) {
        if (!std::filesystem::exists(options.config_path)) {
            throw ConfigError("config file not found: " + options.config_path);
        }
        apply_config_file(resolved, options.config_path);
    }
    if (!options.mode.empty()) {
        auto mode = run_mode_from_string(options.mode);
        if (!mode) {
            throw ConfigError("unknown mode \"" + options.mode + "\"");
        }
        resolved.run.mode = *mode;
    }
    if (!options.metrics.empty()) {
        resolved.run.metrics.clear();
        for (const std::string& metric : split_comma_list(options.metrics)) {
            resolved.run.metrics.insert(metric);
        }
    }
    if (!options.model.empty()) {
        resolved.run.backend.model_name = options.model;
    }
    if (options.temperature) {
        resolved.run.backend.temperature = *options.temperature;
    }
    if (options.max_retries) {
        resolved.run.backend.max_retries = *options.max_retries;
    }
    if (options.max_concurrent) {
        resolved.run.backend.max_concurrent = *options.max_concurrent;
    }
    if (options.rate_limit) {
        resolved.run.backend.rate_limit_per_min = *options.rate_limit;
    }
    if (options.workers) {
        resolved.run.worker_count = *options.workers;
    }
    if (!options.tie_policy.empty()) {
        auto policy = tie_policy_from_string(options.tie_policy);
        if (!policy) {
            throw ConfigError("unknown tie_policy \"" + options.tie_policy + "\"");
        }
        resolved.run.tie_policy = *policy;
    }
    if (options.max_edits) {
        resolved.run.max_edits = static_cast<std::size_t>(*options.max_edits);
    }
    if (options.fail_fast) {
        resolved.run.fail_fast = *options.fail_fast;
    }
    if (!options.task_hint.empty()) {
        resolved.run.default_task_hint = options.task_hint;
    }
    if (!options.keywords_path.empty()) {
        resolved.run.keywords = CategoryKeywords::from_file(options.keywords_path);
    }
    if (!options.backend_kind.empty()) {
        resolved.backend_kind = options.backend_kind;
    }
    if (!options.transcript_path.empty()) {
        resolved.transcript_path = options.transcript_path;
    }
    if (!options.templates_dir.empty()) {
        resolved.templates_dir = options.templates_dir;
    }
    if (options.failure_threshold) {
        resolved.failure_threshold = *options.failure_threshold;
    }
    return resolved;
}

PromptLibrary load_library(const ResolvedRun& resolved) {
    if (resolved.templates_dir.empty()) {
        return PromptLibrary::builtin();
    }
    return PromptLibrary::from_directory(resolved.templates_dir);
}

std::unique_ptr<LLMBackend> make_backend(const ResolvedRun& resolved, bool record) {
    if (resolved.backend_kind == "replay") {
        if (resolved.transcript_path.empty()) {
            throw ConfigError("replay backend needs --transcript");
        }
        return std::make_unique<ReplayBackend>(resolved.run.backend,
                                               Transcript::load(resolved.transcript_path));
    }
    if (resolved.backend_kind == "live") {
        auto live = make_live_backend_from_env(resolved.run.backend);
        if (record) {
            if (resolved.transcript_path.empty()) {
                throw ConfigError("recording needs --transcript");
            }
            return std::make_unique<TranscriptRecorder>(std::move(live),
                                                        resolved.transcript_path);
        }
        return live;
    }
    throw ConfigError("unknown backend \"" + resolved.backend_kind + "\" (use replay or live)");
}

bool write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return true;
    }
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) {
        return false;
    }
    out << content;
    return true;
}

/// Markdown on a terminal, JSON when redirected; --format wins.
std::string pick_format(const CliOptions& options) {
    if (!options.format.empty()) {
        return options.format;
    }
    if (options.output_path.empty() && isatty(fileno(stdout)) != 0) {
        return "markdown";
    }
    return "json";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::optional<std::string> timestamp_or_none(const CliOptions& options) {
    if (options.timestamp.empty()) {
        return std::nullopt;
    }
    return options.timestamp;
}

int finish_run(const RunReport& report, const CliOptions& options, double failure_threshold) {
    std::string format = pick_format(options);
    std::string content = format == "markdown"
                              ? run_report_to_markdown(report, timestamp_or_none(options))
                              : run_report_to_json(report).dump(2) + "\n";
    if (!write_output(options.output_path, content)) {
        std::cerr << "error: cannot write " << options.output_path << "\n";
        return kExitConfig;
    }
    double failed = static_cast<double>(report.diagnostics.failed_documents.size());
    double total = static_cast<double>(report.corpus_size);
    if (total > 0 && failed / total > failure_threshold) {
        std::cerr << "error: " << failed << " of " << total
                  << " documents failed evaluation\n";
        return kExitEvalFailures;
    }
    return kExitOk;
}

int cmd_evaluate(const CliOptions& options, bool record) {
    ResolvedRun resolved = resolve_run(options);
    if (record) {
        resolved.backend_kind = "live";
    }
    PromptLibrary library = load_library(resolved);
    std::unique_ptr<LLMBackend> backend = make_backend(resolved, record);
    std::vector<CorpusRecord> records = load_reference_corpus(options.corpus_path);
    RunReport report = evaluate_corpus(records, resolved.run, *backend, library);
    return finish_run(report, options, resolved.failure_threshold);
}

int cmd_agree(const CliOptions& options) {
    ResolvedRun resolved = resolve_run(options);
    resolved.run.mode = RunMode::reference_free;
    if (resolved.run.metrics.contains("rouge1") || resolved.run.metrics.contains("rouge2") ||
        resolved.run.metrics.contains("rougeL")) {
        resolved.run.metrics = {"revision_distance"};
    }
    PromptLibrary library = load_library(resolved);
    std::unique_ptr<LLMBackend> backend = make_backend(resolved, false);
    std::vector<PreferencePair> pairs = load_preference_corpus(options.corpus_path);
    if (pairs.empty()) {
        std::cerr << "error: no pairs in " << options.corpus_path << "\n";
        return kExitConfig;
    }
    AgreementReport report = run_preference_agreement(pairs, resolved.run, *backend, library);

    std::string format = pick_format(options);
    std::string content = format == "markdown" ? agreement_to_markdown(report)
                                               : agreement_to_json(report).dump(2) + "\n";
    if (!write_output(options.output_path, content)) {
        std::cerr << "error: cannot write " << options.output_path << "\n";
        return kExitConfig;
    }
    double failed = static_cast<double>(report.diagnostics.failed_documents.size());
    double total = static_cast<double>(report.corpus_size);
    if (total > 0 && failed / total > resolved.failure_threshold) {
        std::cerr << "error: " << failed << " of " << total << " pairs failed evaluation\n";
        return kExitEvalFailures;
    }
    return kExitOk;
}

int cmd_compare(const std::string& weak_path, const std::string& strong_path,
                const CliOptions& options) {
    auto load = [](const std::string& path) {
        nlohmann::json data = nlohmann::json::parse(read_text_file(path), nullptr, false);
        if (data.is_discarded()) {
            throw FormatError("not valid JSON: " + path);
        }
        return run_report_from_json(data);
    };
    RunReport weak = load(weak_path);
    RunReport strong = load(strong_path);
    ComparisonReport comparison = compare_runs(weak, strong);

    std::string format = pick_format(options);
    std::string content = format == "markdown" ? comparison_to_markdown(comparison)
                                               : comparison_to_json(comparison).dump(2) + "\n";
    if (!write_output(options.output_path, content)) {
        std::cerr << "error: cannot write " << options.output_path << "\n";
        return kExitConfig;
    }
    return kExitOk;
}

int cmd_rouge(const std::string& candidate_path, const std::string& reference_path) {
    TokenSequence candidate = tokenize(read_text_file(candidate_path));
    TokenSequence reference = tokenize(read_text_file(reference_path));
    std::cout << "ROUGE-1: " << format_fixed(rouge_n(candidate, reference, 1).value, 2) << "\n";
    std::cout << "ROUGE-2: " << format_fixed(rouge_n(candidate, reference, 2).value, 2) << "\n";
    std::cout << "ROUGE-L: " << format_fixed(rouge_l(candidate, reference).value, 2) << "\n";
    return kExitOk;
}

void add_run_flags(CLI::App* cmd, CliOptions& options) {
    cmd->add_option("--config", options.config_path, "flat key = value config file");
    cmd->add_option("--output,-o", options.output_path, "output path (default stdout)");
    cmd->add_option("--format", options.format, "json or markdown")
        ->check(CLI::IsMember({"json", "markdown"}));
    cmd->add_option("--backend", options.backend_kind, "replay or live");
    cmd->add_option("--transcript", options.transcript_path,
                    "transcript file for replay or recording");
    cmd->add_option("--templates", options.templates_dir, "prompt templates directory");
    cmd->add_option("--keywords", options.keywords_path, "category keyword table file");
    cmd->add_option("--mode", options.mode, "reference_based or reference_free");
    cmd->add_option("--metrics", options.metrics, "comma-separated metric list");
    cmd->add_option("--model", options.model, "model name");
    cmd->add_option("--temperature", options.temperature, "sampling temperature");
    cmd->add_option("--workers", options.workers, "worker thread count");
    cmd->add_option("--max-retries", options.max_retries, "transport retry budget");
    cmd->add_option("--max-concurrent", options.max_concurrent, "in-flight request cap");
    cmd->add_option("--rate-limit", options.rate_limit, "requests per minute (0 = off)");
    cmd->add_option("--max-edits", options.max_edits, "edit list cap per document");
    cmd->add_option("--tie-policy", options.tie_policy,
                    "count_as_disagreement, count_as_half or exclude");
    cmd->add_option("--task-hint", options.task_hint, "task hint for records without one");
    cmd->add_option("--failure-threshold", options.failure_threshold,
                    "failed-document fraction tolerated before exit 2");
    cmd->add_option("--stamp-time", options.timestamp,
                    "timestamp string embedded in markdown output");
    cmd->add_flag_callback(
        "--fail-fast", [&options] { options.fail_fast = true; },
        "abort on the first failed document");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Revision-distance evaluation toolkit"};
    app.require_subcommand(1);

    CliOptions options;
    std::string weak_path;
    std::string strong_path;
    std::string candidate_path;
    std::string reference_path;

    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "evaluate a reference corpus and write a run report");
    evaluate->add_option("--corpus", options.corpus_path, "reference corpus (JSON Lines)")
        ->required();
    add_run_flags(evaluate, options);

    CLI::App* replay_record = app.add_subcommand(
        "replay-record", "run a live evaluation while recording a replay transcript");
    replay_record->add_option("--corpus", options.corpus_path, "reference corpus (JSON Lines)")
        ->required();
    add_run_flags(replay_record, options);

    CLI::App* agree = app.add_subcommand(
        "agree", "reference-free agreement over chosen/rejected pairs");
    agree->add_option("--corpus", options.corpus_path, "preference corpus (JSON Lines)")
        ->required();
    add_run_flags(agree, options);

    CLI::App* compare = app.add_subcommand("compare", "compare two run reports");
    compare->add_option("weak", weak_path, "run report JSON of the weak model")->required();
    compare->add_option("strong", strong_path, "run report JSON of the strong model")
        ->required();
    compare->add_option("--output,-o", options.output_path, "output path (default stdout)");
    compare->add_option("--format", options.format, "json or markdown")
        ->check(CLI::IsMember({"json", "markdown"}));

    CLI::App* rouge = app.add_subcommand("rouge", "print ROUGE-1/2/L for two text files");
    rouge->add_option("candidate", candidate_path, "candidate text file")->required();
    rouge->add_option("reference", reference_path, "reference text file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (evaluate->parsed()) {
            return cmd_evaluate(options, false);
        }
        if (replay_record->parsed()) {
            return cmd_evaluate(options, true);
        }
        if (agree->parsed()) {
            return cmd_agree(options);
        }
        if (compare->parsed()) {
            return cmd_compare(weak_path, strong_path, options);
        }
        if (rouge->parsed()) {
            return cmd_rouge(candidate_path, reference_path);
        }
    } catch (const ReplayMiss& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEvalFailures;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
