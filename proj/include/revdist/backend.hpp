#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "revdist/prompts.hpp"

namespace revdist {

struct BackendConfig {
    std::string model_name = "gpt-4";
    double temperature = 0.0; // evaluator calls default to 0 for repeatability
    int max_retries = 3;
    int max_concurrent = 4;
    int rate_limit_per_min = 0; // 0 disables the token bucket
};

/// Stable fingerprint of (template_id, rendered_prompt, model, temperature),
/// the replay lookup key. FNV-1a over a canonical serialization, so the same
/// request hashes identically across runs and platforms.
std::string request_fingerprint(const PromptRequest& request, const std::string& model_name,
                                double temperature);

/// Bounds the number of in-flight complete() calls.
class AdmissionGate {
public:
    explicit AdmissionGate(int limit);
    void acquire();
    void release();

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int limit_;
    int in_flight_ = 0;
};

class LLMBackend {
public:
    explicit LLMBackend(BackendConfig config);
    virtual ~LLMBackend() = default;

    LLMBackend(const LLMBackend&) = delete;
    LLMBackend& operator=(const LLMBackend&) = delete;

    /// Admission-gated completion call. Implementations supply do_complete.
    std::string complete(const PromptRequest& request);

    const BackendConfig& config() const { return config_; }
    virtual std::string_view kind() const = 0;

protected:
    virtual std::string do_complete(const PromptRequest& request) = 0;

private:
    BackendConfig config_;
    AdmissionGate gate_;
};

struct TranscriptEntry {
    std::string fingerprint;
    std::string template_id;
    std::string model;
    double temperature = 0.0;
    std::string response;
};

/// An ordered record of backend calls. Lookup is by fingerprint; the first
/// occurrence wins when a fingerprint repeats.
class Transcript {
public:
    static Transcript load(const std::filesystem::path& path);

    void append(TranscriptEntry entry);
    void save(const std::filesystem::path& path) const;

    std::optional<std::string> lookup(const std::string& fingerprint) const;
    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<TranscriptEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Serves recorded responses byte-for-byte; never touches the network.
class ReplayBackend : public LLMBackend {
public:
    ReplayBackend(BackendConfig config, Transcript transcript);

    std::string_view kind() const override { return "replay"; }

protected:
    std::string do_complete(const PromptRequest& request) override;

private:
    Transcript transcript_;
};

/// Wraps any backend and appends every (request, response) pair to a
/// JSON Lines transcript file. Appends are serialized and flushed per call.
class TranscriptRecorder : public LLMBackend {
public:
    TranscriptRecorder(std::unique_ptr<LLMBackend> inner, const std::filesystem::path& path);

    std::string_view kind() const override { return "recording"; }

protected:
    std::string do_complete(const PromptRequest& request) override;

private:
    std::unique_ptr<LLMBackend> inner_;
    std::filesystem::path path_;
    std::mutex write_mutex_;
};

/// Test backend with canned responses and instrumentation. Responses can be
/// keyed by a substring of the rendered prompt (each key holds a sequence,
/// consumed call by call) with a FIFO queue as the fallback.
class ScriptedBackend : public LLMBackend {
public:
    explicit ScriptedBackend(BackendConfig config = {});

    /// FIFO fallback response.
    void enqueue(std::string response);
    /// Next response for any prompt containing `needle`; keys are checked in
    /// insertion order and each consumes its sequence front to back, sticking
    /// on the last element once exhausted.
    void script(std::string needle, std::vector<std::string> responses);
    /// Throws BackendError for prompts containing `needle` (consumed once).
    void script_failure(std::string needle, std::string message);

    void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }

    int calls() const { return calls_.load(); }
    int max_in_flight() const { return max_in_flight_.load(); }

    std::string_view kind() const override { return "scripted"; }

protected:
    std::string do_complete(const PromptRequest& request) override;

private:
    struct Script {
        std::string needle;
        std::vector<std::string> responses;
        std::size_t next = 0;
        bool fail = false;
        std::string failure_message;
    };

    std::mutex mutex_;
    std::vector<Script> scripts_;
    std::vector<std::string> fifo_;
    std::size_t fifo_next_ = 0;
    std::chrono::milliseconds delay_{0};
    std::atomic<int> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
};

} // namespace revdist
