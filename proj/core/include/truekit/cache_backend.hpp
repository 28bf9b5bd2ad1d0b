#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>

#include "truekit/backend.hpp"

namespace truekit {

struct CacheStats {
    std::size_t hits = 0;
    std::size_t misses = 0;
};

/// Content-addressed on-disk cache in front of any backend. Records live at
/// <dir>/<first-2-hex-of-key>/<key>.json and hold {request, response,
/// timestamp}; the directory only ever grows. Hits are returned with
/// cached = true and never touch the inner backend, so a warm cache makes a
/// re-run issue zero requests.
class FileCacheBackend : public Backend {
public:
    FileCacheBackend(std::filesystem::path dir, BackendPtr inner);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string describe() const override;

    CacheStats stats() const;

private:
    std::filesystem::path record_path(const std::string& key) const;

    std::filesystem::path dir_;
    BackendPtr inner_;
    mutable std::mutex mutex_;
    CacheStats stats_;
};

}  // namespace truekit
