#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "truekit/trec_data.hpp"

namespace truekit {

/// Gain applied to a relevance label inside DCG. Linear matches trec_eval's
/// default; exponential is 2^r - 1.
enum class GainFunction { Linear, Exponential };

struct MetricParams {
    /// Labels >= binarize_at count as relevant for MAP/MRR. Must be in {1,2,3}.
    int binarize_at = 2;
    GainFunction gain = GainFunction::Linear;
    /// When set, unjudged documents are dropped from the ranking before scoring
    /// instead of counting as non-relevant.
    bool judged_only = false;

    void validate() const;
};

GainFunction parse_gain(std::string_view name);  // "linear" | "exp"
std::string_view gain_name(GainFunction gain);

/// One of "ndcg@<k>", "map", "mrr".
struct MetricId {
    enum class Kind { NdcgAtK, Map, Mrr };

    Kind kind = Kind::NdcgAtK;
    int k = 10;  // cutoff, meaningful for NdcgAtK only

    static MetricId parse(std::string_view id);
    std::string str() const;

    bool operator==(const MetricId&) const = default;
};

/// A topic's documents in canonical effectiveness order:
/// score descending, doc-id descending on ties.
struct RankedList {
    std::string topic;
    std::vector<std::string> docs;
};

/// Canonical per-topic ordering of a run. Deterministic and total for any input.
std::map<std::string, RankedList> canonical_sort(const Run& run);

/// NDCG@k with unjudged documents as relevance 0 and the ideal ranking taken
/// from the qrels' own labels. IDCG of 0 yields 0, not NaN.
double ndcg_at_k(const Qrels& qrels, const RankedList& ranked, int k,
                 const MetricParams& params = {});

/// AP over the full ranked list; relevant iff label >= params.binarize_at;
/// 0 when the topic has no relevant documents.
double average_precision(const Qrels& qrels, const RankedList& ranked,
                         const MetricParams& params = {});

/// 1/rank of the first relevant document; 0 when none is retrieved.
double reciprocal_rank(const Qrels& qrels, const RankedList& ranked,
                       const MetricParams& params = {});

struct MetricReport {
    std::string run_tag;
    std::string metric_id;
    std::map<std::string, double> per_topic;  // every qrels topic is present
    double mean = 0.0;
};

/// Scores one run under one metric. Topics in the qrels but absent from the
/// run score 0 and still enter the mean, so every run is averaged over the
/// same topic set.
MetricReport evaluate_run(const Qrels& qrels, const Run& run, const MetricId& metric,
                          const MetricParams& params = {});

/// CSV with header "run,topic,metric,value" plus a mean row with topic="all".
/// Values use shortest round-trip formatting.
void write_metric_report_csv(const MetricReport& report, std::ostream& out);

}  // namespace truekit
