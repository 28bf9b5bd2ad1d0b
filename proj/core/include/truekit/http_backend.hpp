#pragma once

#include <chrono>
#include <string>

#include "truekit/backend.hpp"

namespace truekit {

struct HttpBackendOptions {
    /// Scheme + host (+ optional port), e.g. "https://api.example.com".
    /// Falls back to the TRUE_API_BASE_URL environment variable.
    std::string base_url;
    /// Bearer token; falls back to the TRUE_API_KEY environment variable.
    std::string api_key;
    std::string path = "/v1/chat/completions";
    std::chrono::milliseconds timeout{60000};
};

/// Client for the generic chat-completion HTTP schema: a JSON body with
/// system + user messages, temperature, top_p and max_tokens; the reply text
/// is read from choices[0].message.content. Connection failures, timeouts,
/// 429 and 5xx raise TransportError (retryable); 401/403 raise AuthError;
/// other rejections raise BackendError with the provider message.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendOptions options);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string describe() const override;

private:
    HttpBackendOptions options_;
};

}  // namespace truekit
