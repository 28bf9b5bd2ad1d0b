#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "truekit/http_backend.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>

namespace truekit {

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* value = std::getenv(name);
    return value && *value ? std::string(value) : std::move(fallback);
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
    if (options_.base_url.empty()) {
        options_.base_url = env_or("TRUE_API_BASE_URL", "");
    }
    if (options_.api_key.empty()) {
        options_.api_key = env_or("TRUE_API_KEY", "");
    }
    if (options_.base_url.empty()) {
        throw ValidationError(
            "no API base URL configured (set TRUE_API_BASE_URL or pass --api-base-url)");
    }
}

CompletionResponse HttpBackend::complete(const CompletionRequest& request) {
    request.validate();

    nlohmann::json body{
        {"model", request.model_id},
        {"messages",
         {{{"role", "system"}, {"content", request.system_prompt}},
          {{"role", "user"}, {"content", request.user_prompt}}}},
        {"temperature", request.temperature},
        {"top_p", request.top_p},
        {"max_tokens", request.max_tokens},
    };

    httplib::Client client(options_.base_url);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
        options_.timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(
        options_.timeout));
    httplib::Headers headers;
    if (!options_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + options_.api_key);
    }

    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(options_.path, headers, body.dump(), "application/json");
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    if (!result) {
        throw TransportError("request to " + options_.base_url + " failed: " +
                             httplib::to_string(result.error()));
    }
    if (result->status == 401 || result->status == 403) {
        throw AuthError("authentication rejected (status " +
                        std::to_string(result->status) + ")");
    }
    if (result->status == 429 || result->status >= 500) {
        throw TransportError("provider returned status " +
                             std::to_string(result->status) + ": " + result->body);
    }
    if (result->status != 200) {
        throw BackendError("provider rejected the request (status " +
                           std::to_string(result->status) + "): " + result->body);
    }

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unparseable provider response: ") + e.what());
    }

    CompletionResponse response;
    response.latency_ms = elapsed.count();
    try {
        response.text = doc.at("choices").at(0).at("message").at("content")
                            .get<std::string>();
        response.model_id = doc.value("model", request.model_id);
    } catch (const nlohmann::json::exception&) {
        throw BackendError("provider response missing choices[0].message.content: " +
                           result->body);
    }
    return response;
}

std::string HttpBackend::describe() const {
    return "http(" + options_.base_url + options_.path + ")";
}

}  // namespace truekit
