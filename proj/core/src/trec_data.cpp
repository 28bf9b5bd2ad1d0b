#include "truekit/trec_data.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "truekit/digest.hpp"

namespace truekit {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) fields.push_back(std::move(tok));
    return fields;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

std::optional<long long> parse_int(const std::string& tok) {
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_real(const std::string& tok) {
    // from_chars does not accept a leading '+', which shows up in the wild.
    std::string_view sv(tok);
    if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
    if (sv.empty()) return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (ec != std::errc() || p != sv.data() + sv.size()) return std::nullopt;
    return v;
}

// Strips a trailing '\r' so CRLF files parse the same as LF files.
bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

}  // namespace

std::string_view RelevanceLabel::name() const noexcept {
    switch (value_) {
        case 3: return "Highly Relevant";
        case 2: return "Fairly Relevant";
        case 1: return "Partially Relevant";
        default: return "Not Relevant at all";
    }
}

std::string trim(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

void Qrels::add(const std::string& topic, const std::string& doc, RelevanceLabel label) {
    if (topic.empty() || doc.empty()) {
        throw ValidationError("empty topic or doc id");
    }
    auto has_space = [](const std::string& s) {
        return std::any_of(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c); });
    };
    if (has_space(topic) || has_space(doc)) {
        throw ValidationError("topic and doc ids must be whitespace-free tokens");
    }
    auto [it, inserted] = entries_[topic].emplace(doc, label);
    (void)it;
    if (!inserted) {
        throw ValidationError("duplicate qrels entry for (" + topic + ", " + doc + ")");
    }
    ++size_;
}

std::optional<RelevanceLabel> Qrels::label(const std::string& topic,
                                           const std::string& doc) const {
    auto t = entries_.find(topic);
    if (t == entries_.end()) return std::nullopt;
    auto d = t->second.find(doc);
    if (d == t->second.end()) return std::nullopt;
    return d->second;
}

void Run::add(const std::string& topic, ScoredDoc entry) {
    if (!std::isfinite(entry.score)) {
        throw ValidationError("non-finite score for document " + entry.doc);
    }
    auto& docs = rankings_[topic];
    for (const auto& d : docs) {
        if (d.doc == entry.doc) {
            throw ValidationError("duplicate document " + entry.doc + " for topic " + topic);
        }
    }
    docs.push_back(std::move(entry));
    ++size_;
}

void Corpus::add_query(const std::string& topic, std::string text) {
    std::string t = trim(text);
    if (t.empty()) throw ValidationError("empty query text for topic " + topic);
    auto it = queries_.find(topic);
    if (it == queries_.end()) {
        queries_.emplace(topic, std::move(t));
    } else if (it->second != t) {
        throw ValidationError("conflicting query text for topic " + topic);
    }
}

void Corpus::add_passage(const std::string& doc, std::string text) {
    std::string t = trim(text);
    if (t.empty()) throw ValidationError("empty passage text for document " + doc);
    auto it = passages_.find(doc);
    if (it == passages_.end()) {
        passages_.emplace(doc, std::move(t));
    } else if (it->second != t) {
        throw ValidationError("conflicting passage text for document " + doc);
    }
}

const std::string* Corpus::query(const std::string& topic) const {
    auto it = queries_.find(topic);
    return it == queries_.end() ? nullptr : &it->second;
}

const std::string* Corpus::passage(const std::string& doc) const {
    auto it = passages_.find(doc);
    return it == passages_.end() ? nullptr : &it->second;
}

Qrels parse_qrels(std::istream& in, std::string name) {
    Qrels qrels(std::move(name));
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        auto fields = split_fields(line);
        if (fields.size() < 4) {
            throw ParseError("expected at least 4 fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        }
        auto raw = parse_int(fields[3]);
        if (!raw) {
            throw ParseError("malformed label '" + fields[3] + "'", lineno);
        }
        auto label = RelevanceLabel::parse(static_cast<int>(*raw));
        if (!label) {
            throw ParseError("label out of range", lineno);
        }
        try {
            qrels.add(fields[0], fields[2], *label);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return qrels;
}

void write_qrels(const Qrels& qrels, std::ostream& out) {
    for (const auto& [topic, docs] : qrels.topics()) {
        for (const auto& [doc, label] : docs) {
            out << topic << " 0 " << doc << ' ' << label.value() << '\n';
        }
    }
    if (!out) throw Error("failed writing qrels output");
}

Run parse_run(std::istream& in) {
    Run run;
    std::string tag;
    std::string line;
    std::size_t lineno = 0;
    bool have_tag = false;
    while (next_line(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        auto fields = split_fields(line);
        if (fields.size() != 6) {
            throw ParseError("expected 6 fields, got " + std::to_string(fields.size()),
                             lineno);
        }
        auto rank = parse_int(fields[3]);
        if (!rank) {
            throw ParseError("malformed rank '" + fields[3] + "'", lineno);
        }
        auto score = parse_real(fields[4]);
        if (!score || !std::isfinite(*score)) {
            throw ParseError("non-numeric score '" + fields[4] + "'", lineno);
        }
        if (!have_tag) {
            tag = fields[5];
            run = Run(tag);
            have_tag = true;
        } else if (fields[5] != tag) {
            throw ParseError("inconsistent run tag '" + fields[5] + "' (expected '" +
                                 tag + "')",
                             lineno);
        }
        try {
            run.add(fields[0], ScoredDoc{fields[2], *score, static_cast<int>(*rank)});
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return run;
}

void write_run(const Run& run, std::ostream& out) {
    for (const auto& [topic, docs] : run.rankings()) {
        for (const auto& d : docs) {
            out << topic << " Q0 " << d.doc << ' ' << d.source_rank << ' '
                << format_double(d.score) << ' ' << run.tag() << '\n';
        }
    }
    if (!out) throw Error("failed writing run output");
}

Corpus load_corpus(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (next_line(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        auto field = [&](const char* key) -> std::string {
            if (!record.contains(key) || !record[key].is_string()) {
                throw ParseError(std::string("missing string field '") + key + "'", lineno);
            }
            return record[key].get<std::string>();
        };
        std::string qid = field("qid");
        std::string docid = field("docid");
        try {
            corpus.add_query(qid, field("query"));
            corpus.add_passage(docid, field("text"));
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return corpus;
}

JoinResult join_tasks(const Qrels& qrels, const Corpus& corpus) {
    JoinResult result;
    for (const auto& [topic, docs] : qrels.topics()) {
        const std::string* query = corpus.query(topic);
        for (const auto& [doc, label] : docs) {
            const std::string* passage = corpus.passage(doc);
            if (query && passage) {
                result.tasks.push_back(JudgingTask{topic, doc, *query, *passage, label});
            } else {
                std::string reason;
                if (!query) reason = "missing query text";
                if (!passage) reason += reason.empty() ? "missing passage text"
                                                       : " and passage text";
                result.skipped.push_back({topic, doc, std::move(reason)});
            }
        }
    }
    return result;
}

std::array<std::size_t, 4> label_histogram(const Qrels& qrels) {
    std::array<std::size_t, 4> counts{0, 0, 0, 0};
    for (const auto& [topic, docs] : qrels.topics()) {
        for (const auto& [doc, label] : docs) {
            counts[static_cast<std::size_t>(label.value())]++;
        }
    }
    return counts;
}

}  // namespace truekit
