#include "revdist/backend.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "revdist/errors.hpp"

namespace revdist {

namespace {

// FNV-1a, 64-bit. Chosen over std::hash for cross-run stability: transcript
// files must replay on any build.
std::uint64_t fnv1a(std::string_view data, std::uint64_t state = 0xcbf29ce484222325ull) {
    for (unsigned char c : data) {
        state ^= c;
        state *= 0x100000001b3ull;
    }
    return state;
}

std::string format_temperature(double temperature) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6g", temperature);
    return buffer;
}

} // namespace

std::string request_fingerprint(const PromptRequest& request, const std::string& model_name,
                                double temperature) {
    std::uint64_t state = fnv1a(to_string(request.template_id));
    state = fnv1a("\x1f", state);
    state = fnv1a(model_name, state);
    state = fnv1a("\x1f", state);
    state = fnv1a(format_temperature(temperature), state);
    state = fnv1a("\x1f", state);
    state = fnv1a(request.rendered_prompt, state);
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(state));
    return buffer;
}

AdmissionGate::AdmissionGate(int limit) : limit_(limit > 0 ? limit : 1) {}

void AdmissionGate::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return in_flight_ < limit_; });
    ++in_flight_;
}

void AdmissionGate::release() {
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    cv_.notify_one();
}

LLMBackend::LLMBackend(BackendConfig config)
    : config_(std::move(config)), gate_(config_.max_concurrent) {}

std::string LLMBackend::complete(const PromptRequest& request) {
    gate_.acquire();
    try {
        std::string response = do_complete(request);
        gate_.release();
        return response;
    } catch (...) {
        gate_.release();
        throw;
    }
}

Transcript Transcript::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open transcript " + path.string());
    }
    Transcript transcript;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("bad transcript record: ") + e.what(), line_no);
        }
        if (!record.is_object() || !record.contains("fingerprint") ||
            !record.contains("response")) {
            throw FormatError("transcript record needs fingerprint and response", line_no);
        }
        TranscriptEntry entry;
        entry.fingerprint = record.at("fingerprint").get<std::string>();
        entry.template_id = record.value("template_id", "");
        entry.model = record.value("model", "");
        entry.temperature = record.value("temperature", 0.0);
        entry.response = record.at("response").get<std::string>();
        transcript.append(std::move(entry));
    }
    return transcript;
}

void Transcript::append(TranscriptEntry entry) {
    index_.emplace(entry.fingerprint, entries_.size()); // first occurrence wins
    entries_.push_back(std::move(entry));
}

void Transcript::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write transcript " + path.string());
    }
    for (const TranscriptEntry& entry : entries_) {
        nlohmann::json record = {
            {"fingerprint", entry.fingerprint},   {"template_id", entry.template_id},
            {"model", entry.model},               {"temperature", entry.temperature},
            {"response", entry.response},
        };
        out << record.dump() << '\n';
    }
}

std::optional<std::string> Transcript::lookup(const std::string& fingerprint) const {
    auto it = index_.find(fingerprint);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return entries_[it->second].response;
}

ReplayBackend::ReplayBackend(BackendConfig config, Transcript transcript)
    : LLMBackend(std::move(config)), transcript_(std::move(transcript)) {}

std::string ReplayBackend::do_complete(const PromptRequest& request) {
    std::string fingerprint =
        request_fingerprint(request, config().model_name, config().temperature);
    auto response = transcript_.lookup(fingerprint);
    if (!response.has_value()) {
        throw ReplayMiss("no transcript entry for fingerprint " + fingerprint + " (document " +
                         request.document_id + ")");
    }
    return *response;
}

TranscriptRecorder::TranscriptRecorder(std::unique_ptr<LLMBackend> inner,
                                       const std::filesystem::path& path)
    : LLMBackend(inner->config()), inner_(std::move(inner)), path_(path) {}

std::string TranscriptRecorder::do_complete(const PromptRequest& request) {
    std::string response = inner_->complete(request);
    nlohmann::json record = {
        {"fingerprint", request_fingerprint(request, config().model_name, config().temperature)},
        {"template_id", std::string(to_string(request.template_id))},
        {"model", config().model_name},
        {"temperature", config().temperature},
        {"response", response},
    };
    {
        std::lock_guard lock(write_mutex_);
        std::ofstream out(path_, std::ios::app);
        if (!out) {
            throw IoError("cannot append to transcript " + path_.string());
        }
        out << record.dump() << '\n';
    }
    return response;
}

ScriptedBackend::ScriptedBackend(BackendConfig config) : LLMBackend(std::move(config)) {}

void ScriptedBackend::enqueue(std::string response) {
    std::lock_guard lock(mutex_);
    fifo_.push_back(std::move(response));
}

void ScriptedBackend::script(std::string needle, std::vector<std::string> responses) {
    std::lock_guard lock(mutex_);
    scripts_.push_back({std::move(needle), std::move(responses), 0, false, ""});
}

void ScriptedBackend::script_failure(std::string needle, std::string message) {
    std::lock_guard lock(mutex_);
    scripts_.push_back({std::move(needle), {}, 0, true, std::move(message)});
}

std::string ScriptedBackend::do_complete(const PromptRequest& request) {
    calls_.fetch_add(1);
    int now = in_flight_.fetch_add(1) + 1;
    int seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }

    if (delay_.count() > 0) {
        std::this_thread::sleep_for(delay_);
    }

    struct InFlightGuard {
        std::atomic<int>& counter;
        ~InFlightGuard() { counter.fetch_sub(1); }
    } guard{in_flight_};

    std::lock_guard lock(mutex_);
    for (Script& script : scripts_) {
        if (request.rendered_prompt.find(script.needle) == std::string::npos) {
            continue;
        }
        if (script.fail) {
            script.fail = false; // one-shot
            throw BackendError(script.failure_message, 500);
        }
        if (script.responses.empty()) {
            continue;
        }
        std::size_t pick = std::min(script.next, script.responses.size() - 1);
        ++script.next;
        return script.responses[pick];
    }
    if (fifo_next_ < fifo_.size()) {
        return fifo_[fifo_next_++];
    }
    throw BackendError("scripted backend has no response for document " + request.document_id);
}

} // namespace revdist
