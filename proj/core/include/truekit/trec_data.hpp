#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "truekit/errors.hpp"

namespace truekit {

/// Graded relevance on the four-point scale: 3 - Highly Relevant,
/// 2 - Fairly Relevant, 1 - Partially Relevant, 0 - Not Relevant at all.
class RelevanceLabel {
public:
    static constexpr int kMin = 0;
    static constexpr int kMax = 3;

    explicit RelevanceLabel(int value) : value_(value) {
        if (value < kMin || value > kMax) {
            throw ValidationError("relevance label out of range: " + std::to_string(value));
        }
    }

    /// Non-throwing variant for parsers.
    static std::optional<RelevanceLabel> parse(int value) {
        if (value < kMin || value > kMax) return std::nullopt;
        return RelevanceLabel(value);
    }

    int value() const noexcept { return value_; }
    std::string_view name() const noexcept;

    auto operator<=>(const RelevanceLabel&) const = default;

private:
    int value_;
};

/// Per-topic, per-document graded relevance judgments plus a collection tag.
class Qrels {
public:
    using DocLabels = std::map<std::string, RelevanceLabel>;

    Qrels() = default;
    explicit Qrels(std::string name) : name_(std::move(name)) {}

    /// Throws ValidationError on empty/whitespace ids or a duplicate (topic, doc) pair.
    void add(const std::string& topic, const std::string& doc, RelevanceLabel label);

    std::optional<RelevanceLabel> label(const std::string& topic, const std::string& doc) const;
    bool contains_topic(const std::string& topic) const { return entries_.count(topic) > 0; }

    const std::map<std::string, DocLabels>& topics() const noexcept { return entries_; }
    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    bool operator==(const Qrels& other) const {
        return name_ == other.name_ && entries_ == other.entries_;
    }

private:
    std::string name_;
    std::map<std::string, DocLabels> entries_;  // topic -> doc -> label
    std::size_t size_ = 0;
};

/// One scored document inside a run, keeping the rank column as read from file.
/// Submitted ranks are never used for scoring; ranking is recomputed from scores.
struct ScoredDoc {
    std::string doc;
    double score = 0.0;
    int source_rank = 0;

    bool operator==(const ScoredDoc&) const = default;
};

/// A retrieval system's ranked output, keyed by topic. Per-topic file order is preserved.
class Run {
public:
    Run() = default;
    explicit Run(std::string tag) : tag_(std::move(tag)) {}

    /// Throws ValidationError on duplicate doc within a topic or a non-finite score.
    void add(const std::string& topic, ScoredDoc entry);

    const std::string& tag() const noexcept { return tag_; }
    const std::map<std::string, std::vector<ScoredDoc>>& rankings() const noexcept {
        return rankings_;
    }
    std::size_t size() const noexcept { return size_; }

    bool operator==(const Run& other) const {
        return tag_ == other.tag_ && rankings_ == other.rankings_;
    }

private:
    std::string tag_;
    std::map<std::string, std::vector<ScoredDoc>> rankings_;
    std::size_t size_ = 0;
};

/// Query and passage texts keyed by id. Texts are stored trimmed; they must be
/// non-empty after trimming.
class Corpus {
public:
    /// Conflicting text for an already-known id throws ValidationError;
    /// identical text is deduplicated.
    void add_query(const std::string& topic, std::string text);
    void add_passage(const std::string& doc, std::string text);

    const std::string* query(const std::string& topic) const;
    const std::string* passage(const std::string& doc) const;

    const std::map<std::string, std::string>& queries() const noexcept { return queries_; }
    const std::map<std::string, std::string>& passages() const noexcept { return passages_; }

private:
    std::map<std::string, std::string> queries_;
    std::map<std::string, std::string> passages_;
};

/// The unit of work fed to the judge: one (query, passage) pair, optionally
/// with the human label attached.
struct JudgingTask {
    std::string topic;
    std::string doc;
    std::string query;
    std::string passage;
    std::optional<RelevanceLabel> gold;

    bool operator==(const JudgingTask&) const = default;
};

/// Parse the standard qrels format: "topic-id iteration doc-id label".
/// The iteration column is parsed and discarded. Extra trailing fields are ignored.
/// Throws ParseError with the exact 1-based line number on malformed input.
Qrels parse_qrels(std::istream& in, std::string name = "");

/// Emit "topic 0 docid label" lines sorted by (topic, docid).
/// parse_qrels(write_qrels(q), q.name()) == q.
void write_qrels(const Qrels& qrels, std::ostream& out);

/// Parse the standard run format: "topic-id Q0 doc-id rank score tag".
/// The tag must be identical on every line.
Run parse_run(std::istream& in);

/// Emit "topic Q0 doc rank score tag" lines; scores use shortest round-trip
/// formatting so parse_run(write_run(r)) == r.
void write_run(const Run& run, std::ostream& out);

/// Load a JSONL corpus: one object per line with string fields
/// "qid", "docid", "query", "text".
Corpus load_corpus(std::istream& in);

struct JoinResult {
    struct Skipped {
        std::string topic;
        std::string doc;
        std::string reason;
    };

    std::vector<JudgingTask> tasks;
    std::vector<Skipped> skipped;
};

/// One task per qrels entry whose topic and doc both resolve in the corpus.
/// Unresolved entries go to the skipped list; they are never fatal.
JoinResult join_tasks(const Qrels& qrels, const Corpus& corpus);

/// Entry counts per label value; counts[v] is the number of entries labeled v.
std::array<std::size_t, 4> label_histogram(const Qrels& qrels);

/// Trim leading and trailing ASCII whitespace. The only normalization applied
/// to corpus text; ids and texts stay case-sensitive.
std::string trim(std::string_view text);

}  // namespace truekit
