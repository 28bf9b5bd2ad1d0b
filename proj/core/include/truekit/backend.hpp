#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>

#include "truekit/errors.hpp"

namespace truekit {

struct CompletionRequest {
    std::string model_id;
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.0;
    double top_p = 1.0;
    int max_tokens = 1024;

    void validate() const;
};

struct CompletionResponse {
    std::string text;
    std::string model_id;
    bool cached = false;
    std::int64_t latency_ms = 0;
};

/// Content-addressed key over every request field that can change the model
/// output. Stable across processes and platforms.
std::string cache_key(const CompletionRequest& request);

class Backend {
public:
    virtual ~Backend() = default;
    virtual CompletionResponse complete(const CompletionRequest& request) = 0;
    virtual std::string describe() const = 0;
};

using BackendPtr = std::shared_ptr<Backend>;

enum class BackendRole { Reasoning, Judge };

std::string_view role_name(BackendRole role);

/// Deterministic decoding by default: temperature 0, top_p 1.
struct DecodingParams {
    double temperature = 0.0;
    double top_p = 1.0;
    int max_tokens = 1024;
};

/// A backend bound to a pipeline role, pinned to one model id and one set of
/// decoding parameters.
struct RoleBinding {
    BackendRole role = BackendRole::Reasoning;
    std::string model_id;
    BackendPtr backend;
    DecodingParams decoding;

    CompletionRequest make_request(std::string system_prompt,
                                   std::string user_prompt) const;
    void require(BackendRole expected) const;
};

/// Deriving rubrics and applying them with the same model is a validity hazard;
/// refuse it unless the caller opts in explicitly.
void enforce_role_separation(const RoleBinding& reasoning, const RoleBinding& judge,
                             bool allow_same_model);

struct RetryOptions {
    int max_retries = 3;  // attempts = 1 + max_retries
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
};

/// Retries TransportError failures with exponential backoff. Every other error
/// propagates unchanged.
class RetryingBackend : public Backend {
public:
    RetryingBackend(BackendPtr inner, RetryOptions options);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string describe() const override;

private:
    BackendPtr inner_;
    RetryOptions options_;
};

struct ThrottleOptions {
    int max_in_flight = 4;
    int requests_per_minute = 0;  // 0 = unlimited
};

/// Bounds concurrent calls and the per-minute request rate of the inner
/// backend. Safe for use from any number of threads.
class ThrottledBackend : public Backend {
public:
    ThrottledBackend(BackendPtr inner, ThrottleOptions options);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string describe() const override;

private:
    void acquire();
    void release();

    BackendPtr inner_;
    ThrottleOptions options_;
    std::mutex mutex_;
    std::condition_variable cv_;
    int in_flight_ = 0;
    std::deque<std::chrono::steady_clock::time_point> recent_;
};

}  // namespace truekit
