#include "truekit/backend.hpp"

#include <nlohmann/json.hpp>

#include <thread>

#include "truekit/digest.hpp"

namespace truekit {

void CompletionRequest::validate() const {
    if (model_id.empty()) throw ValidationError("completion request needs a model id");
    if (temperature < 0.0) throw ValidationError("temperature must be >= 0");
    if (!(top_p > 0.0) || top_p > 1.0) throw ValidationError("top_p must be in (0, 1]");
    if (max_tokens < 1) throw ValidationError("max_tokens must be >= 1");
}

std::string cache_key(const CompletionRequest& request) {
    // Floats are serialized through shortest round-trip formatting so the
    // canonical text is identical on every platform.
    nlohmann::json canonical{
        {"max_tokens", request.max_tokens},
        {"model_id", request.model_id},
        {"system_prompt", request.system_prompt},
        {"temperature", format_double(request.temperature)},
        {"top_p", format_double(request.top_p)},
        {"user_prompt", request.user_prompt},
    };
    return sha256_hex(canonical.dump());
}

std::string_view role_name(BackendRole role) {
    return role == BackendRole::Reasoning ? "reasoning" : "judge";
}

CompletionRequest RoleBinding::make_request(std::string system_prompt,
                                            std::string user_prompt) const {
    CompletionRequest request;
    request.model_id = model_id;
    request.system_prompt = std::move(system_prompt);
    request.user_prompt = std::move(user_prompt);
    request.temperature = decoding.temperature;
    request.top_p = decoding.top_p;
    request.max_tokens = decoding.max_tokens;
    return request;
}

void RoleBinding::require(BackendRole expected) const {
    if (role != expected) {
        throw ValidationError(std::string("backend bound to role '") +
                              std::string(role_name(role)) + "' where '" +
                              std::string(role_name(expected)) + "' is required");
    }
    if (!backend) throw ValidationError("role binding has no backend attached");
}

void enforce_role_separation(const RoleBinding& reasoning, const RoleBinding& judge,
                             bool allow_same_model) {
    reasoning.require(BackendRole::Reasoning);
    judge.require(BackendRole::Judge);
    if (reasoning.model_id == judge.model_id && !allow_same_model) {
        throw ValidationError(
            "reasoning and judge are bound to the same model '" + reasoning.model_id +
            "'; deriving and applying rubrics with one model undermines the "
            "evaluation (pass --allow-same-model to override)");
    }
}

RetryingBackend::RetryingBackend(BackendPtr inner, RetryOptions options)
    : inner_(std::move(inner)), options_(options) {
    if (!inner_) throw ValidationError("retry layer needs an inner backend");
    if (options_.max_retries < 0) throw ValidationError("max_retries must be >= 0");
}

CompletionResponse RetryingBackend::complete(const CompletionRequest& request) {
    auto backoff = options_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            return inner_->complete(request);
        } catch (const TransportError&) {
            if (attempt >= options_.max_retries) throw;
        }
        std::this_thread::sleep_for(backoff);
        backoff = std::chrono::milliseconds(static_cast<std::int64_t>(
            static_cast<double>(backoff.count()) * options_.multiplier));
    }
}

std::string RetryingBackend::describe() const {
    return "retry(" + std::to_string(options_.max_retries) + ")+" + inner_->describe();
}

ThrottledBackend::ThrottledBackend(BackendPtr inner, ThrottleOptions options)
    : inner_(std::move(inner)), options_(options) {
    if (!inner_) throw ValidationError("throttle layer needs an inner backend");
    if (options_.max_in_flight < 1) throw ValidationError("max_in_flight must be >= 1");
    if (options_.requests_per_minute < 0) {
        throw ValidationError("requests_per_minute must be >= 0");
    }
}

void ThrottledBackend::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
    ++in_flight_;

    if (options_.requests_per_minute > 0) {
        for (;;) {
            const auto now = std::chrono::steady_clock::now();
            while (!recent_.empty() && now - recent_.front() > std::chrono::minutes(1)) {
                recent_.pop_front();
            }
            if (recent_.size() < static_cast<std::size_t>(options_.requests_per_minute)) {
                recent_.push_back(now);
                break;
            }
            const auto wake = recent_.front() + std::chrono::minutes(1);
            cv_.wait_until(lock, wake);
        }
    }
}

void ThrottledBackend::release() {
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    cv_.notify_all();
}

CompletionResponse ThrottledBackend::complete(const CompletionRequest& request) {
    acquire();
    try {
        auto response = inner_->complete(request);
        release();
        return response;
    } catch (...) {
        release();
        throw;
    }
}

std::string ThrottledBackend::describe() const {
    return "throttle(" + std::to_string(options_.max_in_flight) + ")+" +
           inner_->describe();
}

}  // namespace truekit
