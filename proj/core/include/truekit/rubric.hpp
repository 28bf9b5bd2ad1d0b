#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "truekit/trec_data.hpp"

namespace truekit {

/// The five fixed dimensions every rubric cell is organized under.
inline constexpr std::array<std::string_view, 5> kRubricDimensions{
    "intent_alignment", "coverage", "specificity", "accuracy", "usefulness"};

struct RubricProvenance {
    std::string model;
    std::uint64_t seed = 0;
    std::string dataset;
    int iterations = 0;

    bool operator==(const RubricProvenance&) const = default;
};

/// Per-label rule sets: for each label 0-3, every dimension carries at least
/// one rule. Structural completeness is validated on construction and on
/// every parse.
class Rubric {
public:
    using Rules = std::map<std::string, std::vector<std::string>>;  // dimension -> rules
    using LabelRules = std::array<Rules, 4>;                        // indexed by label value

    Rubric(LabelRules rules, RubricProvenance provenance);

    const Rules& rules_for(RelevanceLabel label) const {
        return rules_[static_cast<std::size_t>(label.value())];
    }
    const LabelRules& rules() const noexcept { return rules_; }
    const RubricProvenance& provenance() const noexcept { return provenance_; }
    void set_provenance(RubricProvenance provenance) { provenance_ = std::move(provenance); }

    bool operator==(const Rubric& other) const { return rules_ == other.rules_; }

private:
    LabelRules rules_;
    RubricProvenance provenance_;
};

/// Throws ValidationError naming the first missing label/dimension or an
/// unexpected dimension key.
void validate_rubric_rules(const Rubric::LabelRules& rules);

/// Full rubric file schema:
/// {version, provenance:{model, seed, dataset, iterations}, labels:{"0".."3": {...}}}.
std::string rubric_to_json(const Rubric& rubric);
Rubric rubric_from_json(const std::string& text);

/// Labels-only object ({"0": {dimension: [rules]}, ...}) — the wire format the
/// synthesis model is asked to emit.
std::string rubric_rules_to_json(const Rubric::LabelRules& rules);
Rubric::LabelRules rubric_rules_from_json(const std::string& text);

/// Mean token-set Jaccard over the 4x5 (label, dimension) cells; 1.0 means
/// the rule sets are token-identical cell by cell.
double rubric_similarity(const Rubric& a, const Rubric& b);

/// Human-readable rendering embedded in judge prompts.
std::string render_rubric_text(const Rubric& rubric);

/// A small complete rubric used by the mock backend and as a fixture.
Rubric make_reference_rubric();

}  // namespace truekit
