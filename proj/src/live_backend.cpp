#include "revdist/live_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <deque>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "revdist/errors.hpp"

namespace revdist {

namespace {

struct ParsedUrl {
    std::string origin;      // scheme://host[:port], what httplib::Client takes
    std::string path_prefix; // e.g. "/v1"
};

ParsedUrl parse_base_url(const std::string& base_url) {
    std::size_t scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("base URL must include a scheme: " + base_url);
    }
    std::size_t path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl parsed;
    if (path_start == std::string::npos) {
        parsed.origin = base_url;
    } else {
        parsed.origin = base_url.substr(0, path_start);
        parsed.path_prefix = base_url.substr(path_start);
    }
    while (!parsed.path_prefix.empty() && parsed.path_prefix.back() == '/') {
        parsed.path_prefix.pop_back();
    }
    return parsed;
}

bool is_transient_status(int status) {
    return status == 408 || status == 409 || status >= 500;
}

/// Sliding-window token bucket: at most `per_minute` admissions in any
/// trailing 60 s window.
class RateLimiter {
public:
    explicit RateLimiter(int per_minute) : per_minute_(per_minute) {}

    void admit() {
        if (per_minute_ <= 0) {
            return;
        }
        using clock = std::chrono::steady_clock;
        std::unique_lock lock(mutex_);
        for (;;) {
            auto now = clock::now();
            while (!stamps_.empty() && now - stamps_.front() >= std::chrono::minutes(1)) {
                stamps_.pop_front();
            }
            if (static_cast<int>(stamps_.size()) < per_minute_) {
                stamps_.push_back(now);
                return;
            }
            auto wake = stamps_.front() + std::chrono::minutes(1);
            cv_.wait_until(lock, wake);
        }
    }

private:
    int per_minute_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<std::chrono::steady_clock::time_point> stamps_;
};

class LiveBackend : public LLMBackend {
public:
    LiveBackend(BackendConfig config, LiveBackendOptions options)
        : LLMBackend(std::move(config)),
          options_(std::move(options)),
          url_(parse_base_url(options_.base_url)),
          limiter_(this->config().rate_limit_per_min) {
        if (options_.api_key.empty()) {
            throw ConfigError("live backend requires an API key");
        }
    }

    std::string_view kind() const override { return "live"; }

protected:
    std::string do_complete(const PromptRequest& request) override {
        nlohmann::json body = {
            {"model", config().model_name},
            {"temperature", config().temperature},
            {"messages",
             {{{"role", "system"}, {"content", request.system_text}},
              {{"role", "user"}, {"content", request.user_text}}}},
        };
        const std::string payload = body.dump();
        const std::string path = url_.path_prefix + "/chat/completions";

        int attempts = config().max_retries + 1;
        std::string last_error = "no attempt made";
        bool rate_limited = false;
        for (int attempt = 0; attempt < attempts; ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::milliseconds(options_.backoff_base_ms) * (1 << (attempt - 1));
                std::this_thread::sleep_for(delay);
            }
            limiter_.admit();

            httplib::Client client(url_.origin);
            client.set_connection_timeout(options_.timeout_seconds, 0);
            client.set_read_timeout(options_.timeout_seconds, 0);
            httplib::Headers headers = {{"Authorization", "Bearer " + options_.api_key}};
            auto result = client.Post(path, headers, payload, "application/json");

            if (!result) {
                last_error = "connection failed: " + httplib::to_string(result.error());
                rate_limited = false;
                continue;
            }
            if (result->status == 200) {
                return extract_content(result->body);
            }
            if (result->status == 429) {
                last_error = "rate limited (HTTP 429)";
                rate_limited = true;
                continue;
            }
            if (is_transient_status(result->status)) {
                last_error = "HTTP " + std::to_string(result->status);
                rate_limited = false;
                continue;
            }
            // 4xx other than 429: retrying will not help.
            throw BackendError("HTTP " + std::to_string(result->status) + " from " +
                                   url_.origin + path + ": " + snippet(result->body),
                               result->status);
        }
        if (rate_limited) {
            throw RateLimited("rate limited after " + std::to_string(attempts) + " attempts");
        }
        throw BackendError("request failed after " + std::to_string(attempts) +
                           " attempts: " + last_error);
    }

private:
    static std::string snippet(const std::string& body) {
        return body.size() <= 200 ? body : body.substr(0, 200) + "...";
    }

    static std::string extract_content(const std::string& body) {
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("unparseable completion response: ") + e.what());
        }
        if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
            parsed["choices"].empty()) {
            throw BackendError("completion response has no choices");
        }
        const auto& message = parsed["choices"][0]["message"];
        if (!message.contains("content") || !message["content"].is_string()) {
            throw BackendError("completion response has no message content");
        }
        return message["content"].get<std::string>();
    }

    LiveBackendOptions options_;
    ParsedUrl url_;
    RateLimiter limiter_;
};

} // namespace

std::unique_ptr<LLMBackend> make_live_backend(BackendConfig config, LiveBackendOptions options) {
    return std::make_unique<LiveBackend>(std::move(config), std::move(options));
}

std::unique_ptr<LLMBackend> make_live_backend_from_env(BackendConfig config) {
    LiveBackendOptions options;
    const char* key = std::getenv(kApiKeyEnvVar);
    if (key == nullptr || *key == '\0') {
        throw ConfigError(std::string(kApiKeyEnvVar) + " is not set");
    }
    options.api_key = key;
    if (const char* base = std::getenv(kApiBaseEnvVar); base != nullptr && *base != '\0') {
        options.base_url = base;
    }
    return make_live_backend(std::move(config), std::move(options));
}

} // namespace revdist
