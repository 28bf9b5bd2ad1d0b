#include "truekit/leaderboard.hpp"

#include <algorithm>
#include <map>

namespace truekit {

Leaderboard build_leaderboard(const Qrels& qrels, const std::vector<Run>& runs,
                              const MetricId& metric, const MetricParams& params) {
    if (runs.empty()) {
        throw ValidationError("a leaderboard needs at least one run");
    }
    Leaderboard board;
    board.metric_id = metric.str();
    board.qrels_tag = qrels.name();
    board.entries.reserve(runs.size());
    for (const auto& run : runs) {
        const auto report = evaluate_run(qrels, run, metric, params);
        board.entries.push_back(LeaderboardEntry{run.tag(), report.mean, 0});
    }
    std::sort(board.entries.begin(), board.entries.end(),
              [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
                  if (a.mean != b.mean) return a.mean > b.mean;
                  return a.run_tag < b.run_tag;
              });
    for (std::size_t i = 0; i < board.entries.size(); ++i) {
        board.entries[i].rank = static_cast<int>(i) + 1;
    }
    return board;
}

LeaderboardCorrelation compare_leaderboards(const Leaderboard& human,
                                            const Leaderboard& llm) {
    std::map<std::string, double> llm_means;
    for (const auto& entry : llm.entries) llm_means.emplace(entry.run_tag, entry.mean);
    if (llm_means.size() != human.entries.size()) {
        throw ValidationError("leaderboards cover different run sets");
    }

    std::vector<double> x;
    std::vector<double> y;
    x.reserve(human.entries.size());
    y.reserve(human.entries.size());
    for (const auto& entry : human.entries) {
        auto it = llm_means.find(entry.run_tag);
        if (it == llm_means.end()) {
            throw ValidationError("run '" + entry.run_tag +
                                  "' is missing from the second leaderboard");
        }
        x.push_back(entry.mean);
        y.push_back(it->second);
    }
    return LeaderboardCorrelation{spearman_rho(x, y), kendall_tau_b(x, y)};
}

std::vector<ScatterPoint> scatter_points(const Qrels& human, const Qrels& llm,
                                         const std::vector<Run>& runs,
                                         const MetricId& metric,
                                         const MetricParams& params) {
    std::vector<ScatterPoint> points;
    for (const auto& run : runs) {
        const auto human_report = evaluate_run(human, run, metric, params);
        const auto llm_report = evaluate_run(llm, run, metric, params);

        for (const auto& [topic, human_score] : human_report.per_topic) {
            ScatterPoint point;
            point.level = ScatterPoint::Level::TopicRun;
            point.run_tag = run.tag();
            point.topic = topic;
            point.x = human_score;
            auto it = llm_report.per_topic.find(topic);
            point.y = it != llm_report.per_topic.end() ? it->second : 0.0;
            points.push_back(std::move(point));
        }

        ScatterPoint mean_point;
        mean_point.level = ScatterPoint::Level::Run;
        mean_point.run_tag = run.tag();
        mean_point.x = human_report.mean;
        mean_point.y = llm_report.mean;
        points.push_back(std::move(mean_point));
    }
    return points;
}

AgreementTable agreement_table(const Qrels& human, const Qrels& llm) {
    std::vector<RelevanceLabel> a;
    std::vector<RelevanceLabel> b;
    for (const auto& [topic, docs] : human.topics()) {
        for (const auto& [doc, label] : docs) {
            if (auto other = llm.label(topic, doc)) {
                a.push_back(label);
                b.push_back(*other);
            }
        }
    }
    if (a.empty()) {
        throw ValidationError("no aligned (topic, doc) pairs between the two qrels");
    }

    AgreementTable table;
    table.aligned_pairs = a.size();
    const auto& schemes = CollapseScheme::all();
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        table.results[i] = cohen_kappa(a, b, schemes[i]);
    }
    return table;
}

}  // namespace truekit
