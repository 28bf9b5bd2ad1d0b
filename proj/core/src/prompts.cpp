#include "truekit/prompts.hpp"

#include <fstream>
#include <sstream>

#include "truekit/digest.hpp"
#include "truekit/errors.hpp"
#include "truekit/trec_data.hpp"

namespace truekit {

namespace {

// Built-in copies of the files under prompts/. tests/test_pipeline.cpp checks
// that the two stay byte-identical.
constexpr std::string_view kReasoningTemplate =
    R"TPL(You explain relevance judgments for search evaluation. Given a query, a passage and the relevance label a trained assessor assigned, you explain which passage features earned that label. You never dispute the label.
---
Topic: {topic_id}
Document: {doc_id}

Query:
{query}

Passage:
{passage}

Assigned relevance label: {label} ({label_name})
Label scale: 3 - Highly Relevant, 2 - Fairly Relevant, 1 - Partially Relevant, 0 - Not Relevant at all.

Explain why this passage earned label {label}. Point at concrete passage features: how the passage aligns with the intent behind the query, what it covers, how specific it is, whether its information is accurate, and how useful it would be to the searcher.
)TPL";

constexpr std::string_view kRubricSynthesisTemplate =
    R"TPL(You distill relevance-judgment explanations into explicit, reusable rubrics for search evaluation. You write rules that let another model reproduce the judgments without seeing the explanations.
---
Below are explanations of why query-passage pairs earned their relevance labels (0-3).

{rationales}
{prior_rubric_section}
Extract structured rules for each relevance label. For every label 0, 1, 2 and 3, group the rules under exactly these five dimensions: intent_alignment, coverage, specificity, accuracy, usefulness. Every dimension must hold at least one rule for every label. Rules must describe observable passage features, not restate the label.

Return the rubric as JSON in a fenced code block shaped like:

```json
{
  "0": {"intent_alignment": ["..."], "coverage": ["..."], "specificity": ["..."], "accuracy": ["..."], "usefulness": ["..."]},
  "1": {"intent_alignment": ["..."], "coverage": ["..."], "specificity": ["..."], "accuracy": ["..."], "usefulness": ["..."]},
  "2": {"intent_alignment": ["..."], "coverage": ["..."], "specificity": ["..."], "accuracy": ["..."], "usefulness": ["..."]},
  "3": {"intent_alignment": ["..."], "coverage": ["..."], "specificity": ["..."], "accuracy": ["..."], "usefulness": ["..."]}
}
```
)TPL";

constexpr std::string_view kJudgeDirectTemplate =
    R"TPL(You assign graded relevance labels to passages using a fixed rubric. You follow the rubric rules exactly and always end with the required output format.
---
Rubric:
{rubric}

Label scale: 3 - Highly Relevant, 2 - Fairly Relevant, 1 - Partially Relevant, 0 - Not Relevant at all.

Topic: {topic_id}
Document: {doc_id}

Query:
{query}

Passage:
{passage}

Apply the rubric to this query-passage pair and pick the label whose rules fit best. Answer with a fenced code block holding a single line:

```
FINAL_LABEL: <0-3>
```
)TPL";

constexpr std::string_view kJudgeReasoningTemplate =
    R"TPL(You assign graded relevance labels to passages using a fixed rubric. You reason along every rubric dimension before deciding and always end with the required output format.
---
Rubric:
{rubric}

Label scale: 3 - Highly Relevant, 2 - Fairly Relevant, 1 - Partially Relevant, 0 - Not Relevant at all.

Topic: {topic_id}
Document: {doc_id}

Query:
{query}

Passage:
{passage}

Analyze this query-passage pair against the rubric one dimension at a time, then pick the label whose rules fit best. Answer with a fenced code block shaped like:

```
INTENT_ALIGNMENT: <one-sentence analysis>
COVERAGE: <one-sentence analysis>
SPECIFICITY: <one-sentence analysis>
ACCURACY: <one-sentence analysis>
USEFULNESS: <one-sentence analysis>
FINAL_LABEL: <0-3>
```
)TPL";

PromptTemplate parse_template(std::string_view text, std::string_view where) {
    const auto pos = text.find("\n---\n");
    if (pos == std::string_view::npos) {
        throw ValidationError("prompt template " + std::string(where) +
                              " is missing the '---' separator line");
    }
    PromptTemplate tpl;
    tpl.system = std::string(text.substr(0, pos));
    tpl.user = std::string(text.substr(pos + 5));
    tpl.sha256 = sha256_hex(text);
    if (trim(tpl.system).empty() || trim(tpl.user).empty()) {
        throw ValidationError("prompt template " + std::string(where) +
                              " has an empty section");
    }
    return tpl;
}

}  // namespace

std::string_view phase_name(PromptPhase phase) {
    switch (phase) {
        case PromptPhase::Reasoning: return "reasoning";
        case PromptPhase::RubricSynthesis: return "rubric_synthesis";
        case PromptPhase::JudgeDirect: return "judge_direct";
        case PromptPhase::JudgeReasoning: return "judge_reasoning";
    }
    return {};
}

PromptLibrary PromptLibrary::builtin() {
    PromptLibrary lib;
    lib.templates_ = {
        parse_template(kReasoningTemplate, "reasoning"),
        parse_template(kRubricSynthesisTemplate, "rubric_synthesis"),
        parse_template(kJudgeDirectTemplate, "judge_direct"),
        parse_template(kJudgeReasoningTemplate, "judge_reasoning"),
    };
    return lib;
}

PromptLibrary PromptLibrary::load_dir(const std::filesystem::path& dir) {
    auto read_file = [&](std::string_view name) {
        const auto path = dir / (std::string(name) + ".txt");
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw ValidationError("cannot open prompt template " + path.string());
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    PromptLibrary lib;
    lib.templates_ = {
        parse_template(read_file("reasoning"), "reasoning"),
        parse_template(read_file("rubric_synthesis"), "rubric_synthesis"),
        parse_template(read_file("judge_direct"), "judge_direct"),
        parse_template(read_file("judge_reasoning"), "judge_reasoning"),
    };
    return lib;
}

std::map<std::string, std::string> PromptLibrary::hashes() const {
    std::map<std::string, std::string> out;
    for (auto phase : {PromptPhase::Reasoning, PromptPhase::RubricSynthesis,
                       PromptPhase::JudgeDirect, PromptPhase::JudgeReasoning}) {
        out.emplace(phase_name(phase), get(phase).sha256);
    }
    return out;
}

std::string render_prompt(std::string_view tpl,
                          const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            const auto close = tpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto it = vars.find(std::string(tpl.substr(i + 1, close - i - 1)));
                if (it != vars.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tpl[i]);
        ++i;
    }
    return out;
}

}  // namespace truekit
