#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "truekit/backend.hpp"
#include "truekit/trec_data.hpp"

namespace truekit {

using TaskKey = std::pair<std::string, std::string>;  // (topic, doc)

struct MockBackendOptions {
    /// Judge-phase answers: label returned for each (topic, doc). Tasks not in
    /// the oracle are judged 0.
    std::map<TaskKey, RelevanceLabel> oracle;
    /// Labels-only rubric JSON returned for synthesis prompts. Empty selects
    /// the built-in reference rubric.
    std::string canned_rubric_json;
    /// Served in order on successive synthesis prompts, then the last one
    /// repeats; overrides canned_rubric_json when non-empty.
    std::vector<std::string> rubric_responses;
    /// Judge prompts for these tasks get an answer with no parseable label.
    std::set<TaskKey> garbage_tasks;
    /// Artificial latency per call, for exercising concurrency bounds.
    std::chrono::milliseconds delay{0};
};

/// Deterministic offline stand-in for a hosted model. It recognizes the phase
/// of a prompt from markers the shipped templates guarantee: judge prompts
/// instruct a FINAL_LABEL answer, synthesis prompts ask for the rubric as
/// JSON, and reasoning prompts state the assigned relevance label. Tasks are
/// identified by the "Topic:" / "Document:" header lines.
class MockBackend : public Backend {
public:
    explicit MockBackend(MockBackendOptions options);

    CompletionResponse complete(const CompletionRequest& request) override;
    std::string describe() const override { return "mock"; }

    int calls() const noexcept { return calls_.load(); }
    int max_in_flight() const noexcept { return max_in_flight_.load(); }

private:
    std::string answer(const CompletionRequest& request);

    MockBackendOptions options_;
    std::atomic<int> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
    std::mutex rubric_mutex_;
    std::size_t rubric_calls_ = 0;
};

/// Oracle covering every entry of the given qrels; judging with it reproduces
/// the human labels exactly.
std::map<TaskKey, RelevanceLabel> oracle_from_qrels(const Qrels& qrels);

}  // namespace truekit
