#pragma once

#include <optional>
#include <string>
#include <vector>

#include "truekit/leaderboard.hpp"

namespace truekit {

enum class ReportFormat { Markdown, Csv };

/// Everything a report renders: per-metric leaderboard pairs with their
/// correlations, plus the agreement table. The manifest hash ties every table
/// back to the exact pipeline configuration that produced it.
struct ReportInputs {
    struct MetricSection {
        std::string metric_id;
        Leaderboard human;
        Leaderboard llm;
        LeaderboardCorrelation correlation;
    };

    std::string dataset_tag;
    std::string manifest_hash;
    std::vector<MetricSection> sections;
    std::optional<AgreementTable> agreement;
};

/// Deterministic report text. The markdown layout puts metrics in columns and
/// the dataset in the row, with one leaderboard table per metric and qrels;
/// CSV flattens the same numbers into "section,metric,scheme,qrels,run,key,value"
/// rows with shortest round-trip values. Byte-identical for equal inputs.
std::string emit_report(const ReportInputs& inputs, ReportFormat format);

/// "level,run,topic,human_score,llm_score" rows, topic-run points first,
/// sorted by (run, topic); values use shortest round-trip formatting.
std::string scatter_csv(const std::vector<ScatterPoint>& points);

/// Static 800x800 SVG over the unit square with the y = x diagonal; blue
/// topic-run markers are drawn beneath red run-level markers. A point (x, y)
/// lands at pixel (60 + 680 x, 740 - 680 y).
std::string scatter_svg(const std::vector<ScatterPoint>& points,
                        const std::string& metric_id);

}  // namespace truekit
