#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace truekit {

enum class PromptPhase { Reasoning, RubricSynthesis, JudgeDirect, JudgeReasoning };

std::string_view phase_name(PromptPhase phase);

/// One phase's template: system section, user section, and the hash of the
/// full template text that manifests pin.
struct PromptTemplate {
    std::string system;
    std::string user;
    std::string sha256;
};

/// Versioned prompt templates. A template file holds the system prompt, a line
/// containing only "---", then the user prompt; "{name}" placeholders are
/// substituted at render time.
class PromptLibrary {
public:
    /// The templates compiled into the library; identical to the files shipped
    /// under prompts/ (a test keeps them in sync).
    static PromptLibrary builtin();

    /// Loads reasoning.txt, rubric_synthesis.txt, judge_direct.txt and
    /// judge_reasoning.txt from a directory.
    static PromptLibrary load_dir(const std::filesystem::path& dir);

    const PromptTemplate& get(PromptPhase phase) const {
        return templates_[static_cast<std::size_t>(phase)];
    }

    /// Phase name -> template hash, as recorded in run manifests.
    std::map<std::string, std::string> hashes() const;

private:
    std::array<PromptTemplate, 4> templates_;
};

/// Replaces "{key}" for every key present in vars; all other text, including
/// unrelated braces, is left untouched.
std::string render_prompt(std::string_view tpl,
                          const std::map<std::string, std::string>& vars);

}  // namespace truekit
