#include "truekit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "truekit/digest.hpp"

namespace truekit {

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted.push_back('"');
    return quoted;
}

std::string escape_pipes(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == '|') out += "\\|";
        else out.push_back(c);
    }
    return out;
}

std::vector<ReportInputs::MetricSection> sorted_sections(const ReportInputs& inputs) {
    auto sections = inputs.sections;
    std::sort(sections.begin(), sections.end(),
              [](const auto& a, const auto& b) { return a.metric_id < b.metric_id; });
    return sections;
}

void emit_markdown(const ReportInputs& inputs, std::ostream& out) {
    const auto sections = sorted_sections(inputs);

    out << "# Evaluation report\n\n";
    out << "- dataset: " << inputs.dataset_tag << '\n';
    out << "- manifest: " << inputs.manifest_hash << '\n';
    if (inputs.agreement) {
        out << "- aligned pairs: " << inputs.agreement->aligned_pairs
            << " (pooled confusion matrix)\n";
    }
    out << '\n';

    out << "## Leaderboard correlations\n\n";
    out << "| dataset |";
    for (const auto& section : sections) {
        out << ' ' << escape_pipes(section.metric_id) << " S | "
            << escape_pipes(section.metric_id) << " T |";
    }
    out << "\n|---|";
    for (std::size_t i = 0; i < sections.size(); ++i) out << "---|---|";
    out << "\n| " << escape_pipes(inputs.dataset_tag) << " |";
    for (const auto& section : sections) {
        out << ' ' << fixed4(section.correlation.spearman.coefficient) << " | "
            << fixed4(section.correlation.kendall.coefficient) << " |";
    }
    out << "\n\nS = Spearman's rho, T = Kendall's tau-b.\n";
    for (const auto& section : sections) {
        out << "- " << section.metric_id << ": n=" << section.correlation.spearman.n
            << ", p(S)=" << fixed4(section.correlation.spearman.p_value)
            << ", p(T)=" << fixed4(section.correlation.kendall.p_value) << '\n';
    }
    out << '\n';

    if (inputs.agreement) {
        out << "## Agreement (Cohen's kappa)\n\n";
        out << "| dataset |";
        for (const auto& scheme : CollapseScheme::all()) {
            out << ' ' << escape_pipes(scheme.name()) << " |";
        }
        out << "\n|---|---|---|---|---|\n";
        out << "| " << escape_pipes(inputs.dataset_tag) << " |";
        for (const auto& result : inputs.agreement->results) {
            out << ' ' << fixed4(result.kappa) << " |";
        }
        out << "\n\n";
    }

    out << "## Leaderboards\n\n";
    for (const auto& section : sections) {
        for (const Leaderboard* board : {&section.human, &section.llm}) {
            out << "### " << section.metric_id << " under " << board->qrels_tag
                << " qrels\n\n";
            out << "| rank | run | mean |\n|---|---|---|\n";
            for (const auto& entry : board->entries) {
                out << "| " << entry.rank << " | " << escape_pipes(entry.run_tag)
                    << " | " << fixed4(entry.mean) << " |\n";
            }
            out << '\n';
        }
    }
}

void emit_csv(const ReportInputs& inputs, std::ostream& out) {
    const auto sections = sorted_sections(inputs);
    auto row = [&](const std::string& section, const std::string& metric,
                   const std::string& scheme, const std::string& qrels,
                   const std::string& run, const std::string& key,
                   const std::string& value) {
        out << csv_field(section) << ',' << csv_field(metric) << ',' << csv_field(scheme)
            << ',' << csv_field(qrels) << ',' << csv_field(run) << ',' << csv_field(key)
            << ',' << csv_field(value) << '\n';
    };

    out << "section,metric,scheme,qrels,run,key,value\n";
    row("meta", "", "", "", "", "dataset", inputs.dataset_tag);
    row("meta", "", "", "", "", "manifest_hash", inputs.manifest_hash);
    if (inputs.agreement) {
        row("meta", "", "", "", "", "aligned_pairs",
            std::to_string(inputs.agreement->aligned_pairs));
    }
    for (const auto& section : sections) {
        const auto& c = section.correlation;
        row("correlation", section.metric_id, "", "", "", "spearman_rho",
            format_double(c.spearman.coefficient));
        row("correlation", section.metric_id, "", "", "", "spearman_p",
            format_double(c.spearman.p_value));
        row("correlation", section.metric_id, "", "", "", "kendall_tau_b",
            format_double(c.kendall.coefficient));
        row("correlation", section.metric_id, "", "", "", "kendall_p",
            format_double(c.kendall.p_value));
        row("correlation", section.metric_id, "", "", "", "n",
            std::to_string(c.spearman.n));
    }
    if (inputs.agreement) {
        for (const auto& result : inputs.agreement->results) {
            const std::string scheme(
                CollapseScheme::from_id(result.scheme).name());
            row("agreement", "", scheme, "", "", "kappa", format_double(result.kappa));
            row("agreement", "", scheme, "", "", "observed_agreement",
                format_double(result.observed_agreement));
            row("agreement", "", scheme, "", "", "n", std::to_string(result.n));
        }
    }
    for (const auto& section : sections) {
        for (const Leaderboard* board : {&section.human, &section.llm}) {
            const std::string which = board == &section.human ? "human" : "llm";
            for (const auto& entry : board->entries) {
                row("leaderboard", section.metric_id, "", which, entry.run_tag, "rank",
                    std::to_string(entry.rank));
                row("leaderboard", section.metric_id, "", which, entry.run_tag, "mean",
                    format_double(entry.mean));
            }
        }
    }
}

}  // namespace

std::string emit_report(const ReportInputs& inputs, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::Markdown) {
        emit_markdown(inputs, out);
    } else {
        emit_csv(inputs, out);
    }
    return out.str();
}

std::string scatter_csv(const std::vector<ScatterPoint>& points) {
    auto sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const ScatterPoint& a, const ScatterPoint& b) {
        if (a.level != b.level) return a.level == ScatterPoint::Level::TopicRun;
        if (a.run_tag != b.run_tag) return a.run_tag < b.run_tag;
        return a.topic.value_or("") < b.topic.value_or("");
    });

    std::ostringstream out;
    out << "level,run,topic,human_score,llm_score\n";
    for (const auto& point : sorted) {
        const bool topic_run = point.level == ScatterPoint::Level::TopicRun;
        out << (topic_run ? "topic-run" : "run") << ',' << csv_field(point.run_tag)
            << ',' << csv_field(point.topic.value_or("")) << ','
            << format_double(point.x) << ',' << format_double(point.y) << '\n';
    }
    return out.str();
}

std::string scatter_svg(const std::vector<ScatterPoint>& points,
                        const std::string& metric_id) {
    if (points.empty()) {
        throw ValidationError("scatter plot needs at least one point");
    }
    constexpr double kSize = 800.0;
    constexpr double kMargin = 60.0;
    constexpr double kPlot = kSize - 2.0 * kMargin;
    auto px = [&](double x) { return kMargin + x * kPlot; };
    auto py = [&](double y) { return kSize - kMargin - y * kPlot; };

    auto sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const ScatterPoint& a, const ScatterPoint& b) {
        if (a.level != b.level) return a.level == ScatterPoint::Level::TopicRun;
        if (a.run_tag != b.run_tag) return a.run_tag < b.run_tag;
        return a.topic.value_or("") < b.topic.value_or("");
    });

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
           "viewBox=\"0 0 800 800\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\"/>\n";
    out << "  <rect x=\"" << fixed2(kMargin) << "\" y=\"" << fixed2(kMargin)
        << "\" width=\"" << fixed2(kPlot) << "\" height=\"" << fixed2(kPlot)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    // Perfect-agreement diagonal.
    out << "  <line x1=\"" << fixed2(px(0.0)) << "\" y1=\"" << fixed2(py(0.0))
        << "\" x2=\"" << fixed2(px(1.0)) << "\" y2=\"" << fixed2(py(1.0))
        << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    for (double tick = 0.0; tick <= 1.0; tick += 0.25) {
        out << "  <line x1=\"" << fixed2(px(tick)) << "\" y1=\"" << fixed2(py(0.0))
            << "\" x2=\"" << fixed2(px(tick)) << "\" y2=\"" << fixed2(py(0.0) + 6.0)
            << "\" stroke=\"black\"/>\n";
        out << "  <text x=\"" << fixed2(px(tick)) << "\" y=\"" << fixed2(py(0.0) + 24.0)
            << "\" font-size=\"14\" text-anchor=\"middle\">" << fixed2(tick)
            << "</text>\n";
        out << "  <line x1=\"" << fixed2(px(0.0) - 6.0) << "\" y1=\"" << fixed2(py(tick))
            << "\" x2=\"" << fixed2(px(0.0)) << "\" y2=\"" << fixed2(py(tick))
            << "\" stroke=\"black\"/>\n";
        out << "  <text x=\"" << fixed2(px(0.0) - 10.0) << "\" y=\""
            << fixed2(py(tick) + 5.0)
            << "\" font-size=\"14\" text-anchor=\"end\">" << fixed2(tick) << "</text>\n";
    }
    out << "  <text x=\"400\" y=\"790\" font-size=\"16\" text-anchor=\"middle\">human "
        << metric_id << "</text>\n";
    out << "  <text x=\"16\" y=\"400\" font-size=\"16\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 16 400)\">llm "
        << metric_id << "</text>\n";
    out << "  <circle cx=\"560\" cy=\"36\" r=\"5\" fill=\"red\"/>\n";
    out << "  <text x=\"572\" y=\"41\" font-size=\"14\">run mean</text>\n";
    out << "  <circle cx=\"660\" cy=\"36\" r=\"3\" fill=\"blue\" "
           "fill-opacity=\"0.5\"/>\n";
    out << "  <text x=\"672\" y=\"41\" font-size=\"14\">topic/run</text>\n";

    // Topic-run markers first so run-level means stay on top.
    for (const auto& point : sorted) {
        if (point.level != ScatterPoint::Level::TopicRun) continue;
        out << "  <circle cx=\"" << fixed2(px(point.x)) << "\" cy=\""
            << fixed2(py(point.y)) << "\" r=\"3\" fill=\"blue\" fill-opacity=\"0.5\"/>\n";
    }
    for (const auto& point : sorted) {
        if (point.level != ScatterPoint::Level::Run) continue;
        out << "  <circle cx=\"" << fixed2(px(point.x)) << "\" cy=\""
            << fixed2(py(point.y)) << "\" r=\"5\" fill=\"red\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace truekit
