#pragma once

#include <memory>
#include <string>

#include "revdist/backend.hpp"

namespace revdist {

inline constexpr const char* kApiKeyEnvVar = "REVDIST_API_KEY";
inline constexpr const char* kApiBaseEnvVar = "REVDIST_API_BASE";
inline constexpr const char* kDefaultApiBase = "https://api.openai.com/v1";

struct LiveBackendOptions {
    std::string base_url = kDefaultApiBase; // scheme://host[:port][/prefix]
    std::string api_key;
    int backoff_base_ms = 500; // doubled per retry
    int timeout_seconds = 120;
};

/// Chat-completion client: one system message plus one user message per
/// call, retried with exponential backoff on transient failures.
std::unique_ptr<LLMBackend> make_live_backend(BackendConfig config, LiveBackendOptions options);

/// Reads REVDIST_API_KEY (required) and REVDIST_API_BASE (optional).
std::unique_ptr<LLMBackend> make_live_backend_from_env(BackendConfig config);

} // namespace revdist
