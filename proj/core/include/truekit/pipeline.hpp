#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "truekit/backend.hpp"
#include "truekit/prompts.hpp"
#include "truekit/rubric.hpp"
#include "truekit/trec_data.hpp"

namespace truekit {

/// A stratified draw: up to per_label_n tasks per relevance label, drawn
/// uniformly without replacement. Groups are disjoint by construction.
struct Sample {
    std::array<std::vector<JudgingTask>, 4> groups;  // indexed by label value
    std::uint64_t seed = 0;
    int per_label_n = 0;
    /// requested minus drawn, per label; non-zero when a stratum ran short.
    std::array<int, 4> shortfall{0, 0, 0, 0};

    std::vector<JudgingTask> all() const;
    std::size_t size() const;
};

/// Deterministic given (tasks up to reordering, per_label_n, seed): tasks are
/// order-normalized by (topic, doc) before drawing. Every label stratum must
/// be non-empty.
Sample stratified_sample(const std::vector<JudgingTask>& tasks, int per_label_n,
                         std::uint64_t seed);

/// Stable per-stream derivation for iteration seeds (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct TaskFailure {
    std::string topic;
    std::string doc;
    std::string message;
};

struct TaskRationale {
    JudgingTask task;
    std::string text;
};

struct ReasoningSet {
    std::vector<TaskRationale> rationales;
    std::string model_id;
    int iteration = 0;
};

struct ReasoningOutcome {
    ReasoningSet set;
    std::vector<TaskFailure> failures;  // empty responses and backend failures
};

/// One explanation request per sampled task, embedding query, passage and the
/// gold label. Responses are stored verbatim; failed tasks are reported, not
/// fatal.
ReasoningOutcome generate_reasoning(const Sample& sample, const RoleBinding& reasoning,
                                    const PromptLibrary& prompts);

/// Single synthesis request carrying every rationale (and the prior rubric
/// when present); the response must contain the labels-only rubric JSON.
/// Unparseable responses are retried up to 3 times with a format reminder.
Rubric synthesize_rubric(const ReasoningSet& reasoning,
                         const std::optional<Rubric>& prior,
                         const RoleBinding& reasoning_binding,
                         const PromptLibrary& prompts);

struct RefineOptions {
    int per_label_n = 8;
    std::uint64_t seed = 0;
    int max_iterations = 3;
    /// Mean token-set Jaccard between successive rubrics at which refinement
    /// stops early. Must be in (0, 1].
    double stability_threshold = 0.9;
    std::string dataset_tag;
};

struct RefineIteration {
    int iteration = 0;
    /// Similarity to the previous iteration's rubric; unset on the first.
    std::optional<double> similarity;
    std::size_t reasoning_failures = 0;
};

struct RefineResult {
    Rubric rubric;
    std::vector<RefineIteration> log;
    std::string stop_reason;
};

/// The iterative loop: re-sample with a derived per-iteration seed, generate
/// reasoning, synthesize a rubric with the previous one as prior; stop when
/// successive rubrics are stable or max_iterations is reached.
RefineResult refine_until_stable(const std::vector<JudgingTask>& tasks,
                                 const RoleBinding& reasoning,
                                 const PromptLibrary& prompts,
                                 const RefineOptions& options);

enum class JudgeMode { Direct, Reasoning };

std::string_view judge_mode_name(JudgeMode mode);
JudgeMode parse_judge_mode(std::string_view name);  // "direct" | "reasoning"

/// One judging decision with its full audit trail: the prompt hash equals the
/// cache key of the request that produced the accepted output.
struct JudgmentRecord {
    std::string topic;
    std::string doc;
    RelevanceLabel label{0};
    /// All five dimensions, present in reasoning mode only.
    std::optional<std::map<std::string, std::string>> dimension_rationales;
    std::string raw_output;
    std::string prompt_hash;
    JudgeMode mode = JudgeMode::Direct;
    std::string model_id;
};

/// Zero-shot rubric application; the gold label never enters judge prompts.
/// Unparseable output after 3 format-retry attempts is a hard error for the
/// task.
JudgmentRecord judge_direct(const JudgingTask& task, const Rubric& rubric,
                            const RoleBinding& judge, const PromptLibrary& prompts);

/// Adds per-dimension analysis before the final label; all five dimension
/// rationales must be present in the output.
JudgmentRecord judge_with_reasoning(const JudgingTask& task, const Rubric& rubric,
                                    const RoleBinding& judge,
                                    const PromptLibrary& prompts);

struct BatchJudgeResult {
    Qrels qrels;
    std::vector<JudgmentRecord> records;   // sorted by (topic, doc)
    std::vector<TaskFailure> failures;     // sorted by (topic, doc)
};

/// Judges every task with at most `parallelism` requests in flight. Failed
/// tasks are collected, never silently labeled. The result is independent of
/// completion order and of the parallelism level.
BatchJudgeResult batch_judge(const std::vector<JudgingTask>& tasks, const Rubric& rubric,
                             const RoleBinding& judge, JudgeMode mode, int parallelism,
                             const PromptLibrary& prompts);

struct ParsedJudgment {
    RelevanceLabel label{0};
    std::optional<std::map<std::string, std::string>> dimension_rationales;
};

/// Parses the judgment output schema: a fenced block whose final-answer line
/// is "FINAL_LABEL: <0-3>", preceded by the five dimension fields in
/// reasoning mode. Tolerates surrounding prose and markdown; a bare
/// "Label: <n>" line is accepted when no FINAL_LABEL field is present.
ParsedJudgment parse_judgment(const std::string& raw, JudgeMode mode);

}  // namespace truekit
