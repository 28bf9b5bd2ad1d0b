#include "truekit/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "truekit/digest.hpp"

namespace truekit {

namespace {

double gain_of(int label, GainFunction gain) {
    if (gain == GainFunction::Exponential) {
        return std::exp2(static_cast<double>(label)) - 1.0;
    }
    return static_cast<double>(label);
}

// Labels of the ranked docs under the given qrels topic; unjudged docs are
// label 0 or dropped entirely in judged-only mode.
std::vector<int> ranked_labels(const Qrels::DocLabels* judged,
                               const RankedList& ranked, bool judged_only) {
    std::vector<int> labels;
    labels.reserve(ranked.docs.size());
    for (const auto& doc : ranked.docs) {
        int label = 0;
        bool found = false;
        if (judged) {
            auto it = judged->find(doc);
            if (it != judged->end()) {
                label = it->second.value();
                found = true;
            }
        }
        if (judged_only && !found) continue;
        labels.push_back(label);
    }
    return labels;
}

const Qrels::DocLabels* topic_labels(const Qrels& qrels, const std::string& topic) {
    auto it = qrels.topics().find(topic);
    return it == qrels.topics().end() ? nullptr : &it->second;
}

}  // namespace

void MetricParams::validate() const {
    if (binarize_at < 1 || binarize_at > 3) {
        throw ValidationError("binarize-at must be 1, 2 or 3");
    }
}

GainFunction parse_gain(std::string_view name) {
    if (name == "linear") return GainFunction::Linear;
    if (name == "exp") return GainFunction::Exponential;
    throw ValidationError("unknown gain function '" + std::string(name) +
                          "' (expected 'linear' or 'exp')");
}

std::string_view gain_name(GainFunction gain) {
    return gain == GainFunction::Linear ? "linear" : "exp";
}

MetricId MetricId::parse(std::string_view id) {
    if (id == "map") return MetricId{Kind::Map, 0};
    if (id == "mrr") return MetricId{Kind::Mrr, 0};
    constexpr std::string_view prefix = "ndcg@";
    if (id.substr(0, prefix.size()) == prefix) {
        auto tail = id.substr(prefix.size());
        int k = 0;
        auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), k);
        if (ec == std::errc() && p == tail.data() + tail.size() && k >= 1) {
            return MetricId{Kind::NdcgAtK, k};
        }
    }
    throw ValidationError("unknown metric id '" + std::string(id) +
                          "' (expected ndcg@<k>, map or mrr)");
}

std::string MetricId::str() const {
    switch (kind) {
        case Kind::Map: return "map";
        case Kind::Mrr: return "mrr";
        case Kind::NdcgAtK: return "ndcg@" + std::to_string(k);
    }
    return {};
}

std::map<std::string, RankedList> canonical_sort(const Run& run) {
    std::map<std::string, RankedList> out;
    for (const auto& [topic, docs] : run.rankings()) {
        std::vector<ScoredDoc> sorted = docs;
        std::sort(sorted.begin(), sorted.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.doc > b.doc;
        });
        RankedList list;
        list.topic = topic;
        list.docs.reserve(sorted.size());
        for (auto& d : sorted) list.docs.push_back(std::move(d.doc));
        out.emplace(topic, std::move(list));
    }
    return out;
}

double ndcg_at_k(const Qrels& qrels, const RankedList& ranked, int k,
                 const MetricParams& params) {
    if (k < 1) throw ValidationError("ndcg cutoff must be >= 1");
    const auto* judged = topic_labels(qrels, ranked.topic);
    const auto labels = ranked_labels(judged, ranked, params.judged_only);

    double dcg = 0.0;
    const std::size_t depth = std::min<std::size_t>(k, labels.size());
    for (std::size_t i = 0; i < depth; ++i) {
        dcg += gain_of(labels[i], params.gain) / std::log2(static_cast<double>(i) + 2.0);
    }

    std::vector<int> ideal;
    if (judged) {
        ideal.reserve(judged->size());
        for (const auto& [doc, label] : *judged) ideal.push_back(label.value());
        std::sort(ideal.begin(), ideal.end(), std::greater<>());
    }
    double idcg = 0.0;
    const std::size_t ideal_depth = std::min<std::size_t>(k, ideal.size());
    for (std::size_t i = 0; i < ideal_depth; ++i) {
        idcg += gain_of(ideal[i], params.gain) / std::log2(static_cast<double>(i) + 2.0);
    }

    return idcg > 0.0 ? dcg / idcg : 0.0;
}

double average_precision(const Qrels& qrels, const RankedList& ranked,
                         const MetricParams& params) {
    params.validate();
    const auto* judged = topic_labels(qrels, ranked.topic);
    if (!judged) return 0.0;

    std::size_t total_relevant = 0;
    for (const auto& [doc, label] : *judged) {
        if (label.value() >= params.binarize_at) ++total_relevant;
    }
    if (total_relevant == 0) return 0.0;

    const auto labels = ranked_labels(judged, ranked, params.judged_only);
    double sum = 0.0;
    std::size_t seen_relevant = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= params.binarize_at) {
            ++seen_relevant;
            sum += static_cast<double>(seen_relevant) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double reciprocal_rank(const Qrels& qrels, const RankedList& ranked,
                       const MetricParams& params) {
    params.validate();
    const auto* judged = topic_labels(qrels, ranked.topic);
    const auto labels = ranked_labels(judged, ranked, params.judged_only);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= params.binarize_at) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

MetricReport evaluate_run(const Qrels& qrels, const Run& run, const MetricId& metric,
                          const MetricParams& params) {
    params.validate();
    MetricReport report;
    report.run_tag = run.tag();
    report.metric_id = metric.str();

    const auto ranked_by_topic = canonical_sort(run);
    double sum = 0.0;
    for (const auto& [topic, docs] : qrels.topics()) {
        RankedList empty{topic, {}};
        const RankedList* ranked = &empty;
        auto it = ranked_by_topic.find(topic);
        if (it != ranked_by_topic.end()) ranked = &it->second;

        double value = 0.0;
        switch (metric.kind) {
            case MetricId::Kind::NdcgAtK:
                value = ndcg_at_k(qrels, *ranked, metric.k, params);
                break;
            case MetricId::Kind::Map:
                value = average_precision(qrels, *ranked, params);
                break;
            case MetricId::Kind::Mrr:
                value = reciprocal_rank(qrels, *ranked, params);
                break;
        }
        report.per_topic.emplace(topic, value);
        sum += value;
    }
    report.mean = report.per_topic.empty()
                      ? 0.0
                      : sum / static_cast<double>(report.per_topic.size());
    return report;
}

void write_metric_report_csv(const MetricReport& report, std::ostream& out) {
    out << "run,topic,metric,value\n";
    for (const auto& [topic, value] : report.per_topic) {
        out << report.run_tag << ',' << topic << ',' << report.metric_id << ','
            << format_double(value) << '\n';
    }
    out << report.run_tag << ",all," << report.metric_id << ','
        << format_double(report.mean) << '\n';
}

}  // namespace truekit
