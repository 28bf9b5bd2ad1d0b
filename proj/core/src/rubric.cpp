#include "truekit/rubric.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace truekit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::set<std::string> token_set(const std::vector<std::string>& rules) {
    std::set<std::string> tokens;
    for (const auto& rule : rules) {
        std::string current;
        for (char c : rule) {
            if (std::isalnum(static_cast<unsigned char>(c))) {
                current.push_back(static_cast<char>(
                    std::tolower(static_cast<unsigned char>(c))));
            } else if (!current.empty()) {
                tokens.insert(std::move(current));
                current.clear();
            }
        }
        if (!current.empty()) tokens.insert(std::move(current));
    }
    return tokens;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t intersection = 0;
    for (const auto& t : a) intersection += b.count(t);
    const std::size_t unions = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(unions);
}

ordered_json rules_to_json_object(const Rubric::LabelRules& rules) {
    ordered_json labels = ordered_json::object();
    for (int value = 0; value <= 3; ++value) {
        ordered_json cell = ordered_json::object();
        const auto& per_dim = rules[static_cast<std::size_t>(value)];
        for (auto dim : kRubricDimensions) {
            cell[std::string(dim)] = per_dim.at(std::string(dim));
        }
        labels[std::to_string(value)] = std::move(cell);
    }
    return labels;
}

Rubric::LabelRules rules_from_json_object(const nlohmann::json& labels) {
    if (!labels.is_object()) {
        throw ValidationError("rubric labels must be a JSON object");
    }
    Rubric::LabelRules rules;
    for (int value = 0; value <= 3; ++value) {
        const std::string key = std::to_string(value);
        if (!labels.contains(key)) {
            throw ValidationError("incomplete rubric: missing label " + key);
        }
        const auto& cell = labels[key];
        if (!cell.is_object()) {
            throw ValidationError("rubric label " + key + " must be a JSON object");
        }
        Rubric::Rules per_dim;
        for (const auto& [dim, value_json] : cell.items()) {
            if (std::find(kRubricDimensions.begin(), kRubricDimensions.end(), dim) ==
                kRubricDimensions.end()) {
                throw ValidationError("unexpected rubric dimension '" + dim +
                                      "' for label " + key);
            }
            std::vector<std::string> cell_rules;
            if (value_json.is_array()) {
                for (const auto& rule : value_json) {
                    if (rule.is_string()) cell_rules.push_back(rule.get<std::string>());
                }
            } else if (value_json.is_string()) {
                cell_rules.push_back(value_json.get<std::string>());
            }
            per_dim[dim] = std::move(cell_rules);
        }
        rules[static_cast<std::size_t>(value)] = std::move(per_dim);
    }
    validate_rubric_rules(rules);
    return rules;
}

}  // namespace

Rubric::Rubric(LabelRules rules, RubricProvenance provenance)
    : rules_(std::move(rules)), provenance_(std::move(provenance)) {
    validate_rubric_rules(rules_);
}

void validate_rubric_rules(const Rubric::LabelRules& rules) {
    for (int value = 0; value <= 3; ++value) {
        const auto& per_dim = rules[static_cast<std::size_t>(value)];
        for (auto dim : kRubricDimensions) {
            auto it = per_dim.find(std::string(dim));
            if (it == per_dim.end() || it->second.empty()) {
                throw ValidationError("incomplete rubric: label " +
                                      std::to_string(value) + " missing dimension '" +
                                      std::string(dim) + "'");
            }
            for (const auto& rule : it->second) {
                if (trim(rule).empty()) {
                    throw ValidationError("incomplete rubric: empty rule under label " +
                                          std::to_string(value) + ", dimension '" +
                                          std::string(dim) + "'");
                }
            }
        }
        if (per_dim.size() != kRubricDimensions.size()) {
            throw ValidationError("rubric label " + std::to_string(value) +
                                  " must carry exactly the five fixed dimensions");
        }
    }
}

std::string rubric_to_json(const Rubric& rubric) {
    ordered_json doc;
    doc["version"] = 1;
    doc["provenance"] = {
        {"model", rubric.provenance().model},
        {"seed", rubric.provenance().seed},
        {"dataset", rubric.provenance().dataset},
        {"iterations", rubric.provenance().iterations},
    };
    doc["labels"] = rules_to_json_object(rubric.rules());
    return doc.dump(2) + "\n";
}

Rubric rubric_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid rubric JSON: ") + e.what());
    }
    if (!doc.contains("labels")) {
        throw ValidationError("rubric file missing 'labels'");
    }
    RubricProvenance provenance;
    if (doc.contains("provenance") && doc["provenance"].is_object()) {
        const auto& p = doc["provenance"];
        provenance.model = p.value("model", std::string{});
        provenance.seed = p.value("seed", std::uint64_t{0});
        provenance.dataset = p.value("dataset", std::string{});
        provenance.iterations = p.value("iterations", 0);
    }
    return Rubric(rules_from_json_object(doc["labels"]), std::move(provenance));
}

std::string rubric_rules_to_json(const Rubric::LabelRules& rules) {
    return rules_to_json_object(rules).dump(2);
}

Rubric::LabelRules rubric_rules_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid rubric JSON: ") + e.what());
    }
    // Accept either the bare labels object or a full rubric file.
    if (doc.is_object() && doc.contains("labels")) {
        return rules_from_json_object(doc["labels"]);
    }
    return rules_from_json_object(doc);
}

double rubric_similarity(const Rubric& a, const Rubric& b) {
    double sum = 0.0;
    for (int value = 0; value <= 3; ++value) {
        const auto& cell_a = a.rules()[static_cast<std::size_t>(value)];
        const auto& cell_b = b.rules()[static_cast<std::size_t>(value)];
        for (auto dim : kRubricDimensions) {
            sum += jaccard(token_set(cell_a.at(std::string(dim))),
                           token_set(cell_b.at(std::string(dim))));
        }
    }
    return sum / (4.0 * static_cast<double>(kRubricDimensions.size()));
}

std::string render_rubric_text(const Rubric& rubric) {
    std::ostringstream out;
    for (int value = 3; value >= 0; --value) {
        RelevanceLabel label(value);
        out << "Label " << value << " (" << label.name() << "):\n";
        const auto& per_dim = rubric.rules_for(label);
        for (auto dim : kRubricDimensions) {
            out << "  " << dim << ":\n";
            for (const auto& rule : per_dim.at(std::string(dim))) {
                out << "    - " << rule << '\n';
            }
        }
    }
    return out.str();
}

Rubric make_reference_rubric() {
    Rubric::LabelRules rules;
    struct DimensionText {
        std::string_view dim;
        std::array<std::string_view, 4> by_label;  // label 0..3
    };
    static const std::array<DimensionText, 5> table{{
        {"intent_alignment",
         {"The passage does not address the intent behind the query.",
          "The passage touches the query topic but misses the underlying intent.",
          "The passage addresses the main intent with minor digressions.",
          "The passage squarely addresses the intent behind the query."}},
        {"coverage",
         {"No part of the information need is covered.",
          "Only a small fragment of the information need is covered.",
          "Most aspects of the information need are covered.",
          "The information need is covered in breadth and depth."}},
        {"specificity",
         {"The passage is generic boilerplate unrelated to the query terms.",
          "The passage is vague and only loosely connected to the query.",
          "The passage is focused, with specifics tied to the query.",
          "The passage is precise and directly grounded in the query context."}},
        {"accuracy",
         {"The passage contradicts well-established facts or is incoherent.",
          "The passage contains claims that are doubtful or unverifiable.",
          "The passage is factually sound with negligible imprecision.",
          "The passage is factually correct and reliable throughout."}},
        {"usefulness",
         {"A searcher would gain nothing from this passage.",
          "A searcher would need to keep searching after reading it.",
          "A searcher would be mostly satisfied after reading it.",
          "A searcher could stop searching after reading this passage."}},
    }};
    for (const auto& row : table) {
        for (int value = 0; value <= 3; ++value) {
            rules[static_cast<std::size_t>(value)][std::string(row.dim)] = {
                std::string(row.by_label[static_cast<std::size_t>(value)])};
        }
    }
    return Rubric(std::move(rules), RubricProvenance{"reference", 0, "builtin", 0});
}

}  // namespace truekit
