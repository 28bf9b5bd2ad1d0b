#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "truekit/metrics.hpp"
#include "truekit/stats.hpp"
#include "truekit/trec_data.hpp"

namespace truekit {

struct LeaderboardEntry {
    std::string run_tag;
    double mean = 0.0;
    int rank = 0;  // ordinal display rank; ties broken by run tag
};

struct Leaderboard {
    std::string metric_id;
    std::string qrels_tag;
    std::vector<LeaderboardEntry> entries;  // sorted by mean desc, tag asc
};

/// One entry per run from evaluate_run means; deterministic ordering
/// (value desc, run-tag asc on exact ties). Needs at least one run.
Leaderboard build_leaderboard(const Qrels& qrels, const std::vector<Run>& runs,
                              const MetricId& metric, const MetricParams& params = {});

struct LeaderboardCorrelation {
    CorrelationResult spearman;
    CorrelationResult kendall;
};

/// Aligns the two leaderboards by run tag and correlates their mean values.
/// Tied means enter the correlation through average ranks inside the stats
/// routines. The run-tag sets must match.
LeaderboardCorrelation compare_leaderboards(const Leaderboard& human,
                                            const Leaderboard& llm);

struct ScatterPoint {
    enum class Level { Run, TopicRun };

    double x = 0.0;  // score under human qrels
    double y = 0.0;  // score under LLM qrels
    Level level = Level::Run;
    std::string run_tag;
    std::optional<std::string> topic;  // present iff level == TopicRun
};

/// One run-level point per run (mean vs mean) plus one topic-run point per
/// (topic, run). Topics come from the human qrels; a topic missing from the
/// LLM qrels scores 0 on the y axis, mirroring evaluate_run.
std::vector<ScatterPoint> scatter_points(const Qrels& human, const Qrels& llm,
                                         const std::vector<Run>& runs,
                                         const MetricId& metric,
                                         const MetricParams& params = {});

struct AgreementTable {
    std::array<AgreementResult, 4> results;  // scheme order: 4-point, 0|123, 01|23, 012|3
    std::size_t aligned_pairs = 0;
};

/// Cohen's kappa per collapse scheme over the intersection of (topic, doc)
/// keys, pooled into a single confusion matrix. Errors when no keys align.
AgreementTable agreement_table(const Qrels& human, const Qrels& llm);

}  // namespace truekit
