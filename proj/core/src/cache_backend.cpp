#include "truekit/cache_backend.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>

namespace truekit {

namespace {

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::optional<CompletionResponse> read_record(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    nlohmann::json doc;
    try {
        in >> doc;
        const auto& r = doc.at("response");
        CompletionResponse response;
        response.text = r.at("text").get<std::string>();
        response.model_id = r.at("model_id").get<std::string>();
        response.latency_ms = r.value("latency_ms", std::int64_t{0});
        response.cached = true;
        return response;
    } catch (const nlohmann::json::exception&) {
        // Unreadable record: treat as a miss and let a fresh fetch replace it.
        return std::nullopt;
    }
}

}  // namespace

FileCacheBackend::FileCacheBackend(std::filesystem::path dir, BackendPtr inner)
    : dir_(std::move(dir)), inner_(std::move(inner)) {
    if (!inner_) throw ValidationError("cache layer needs an inner backend");
    std::filesystem::create_directories(dir_);
}

std::filesystem::path FileCacheBackend::record_path(const std::string& key) const {
    return dir_ / key.substr(0, 2) / (key + ".json");
}

CompletionResponse FileCacheBackend::complete(const CompletionRequest& request) {
    request.validate();
    const std::string key = cache_key(request);
    const auto path = record_path(key);

    if (auto hit = read_record(path)) {
        std::lock_guard lock(mutex_);
        ++stats_.hits;
        return *hit;
    }

    auto response = inner_->complete(request);

    nlohmann::ordered_json record;
    record["request"] = {
        {"model_id", request.model_id},     {"system_prompt", request.system_prompt},
        {"user_prompt", request.user_prompt}, {"temperature", request.temperature},
        {"top_p", request.top_p},           {"max_tokens", request.max_tokens},
    };
    record["response"] = {
        {"text", response.text},
        {"model_id", response.model_id},
        {"cached", false},
        {"latency_ms", response.latency_ms},
    };
    record["timestamp"] = iso8601_utc_now();

    {
        std::lock_guard lock(mutex_);
        ++stats_.misses;
        std::filesystem::create_directories(path.parent_path());
        // Write-then-rename keeps half-written records out of the cache.
        const auto tmp = path.parent_path() / (key + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << record.dump(2) << '\n';
            if (!out) throw Error("failed writing cache record " + tmp.string());
        }
        std::filesystem::rename(tmp, path);
    }
    return response;
}

std::string FileCacheBackend::describe() const {
    return "cache(" + dir_.string() + ")+" + inner_->describe();
}

CacheStats FileCacheBackend::stats() const {
    std::lock_guard lock(mutex_);
    return stats_;
}

}  // namespace truekit
