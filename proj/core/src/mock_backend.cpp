#include "truekit/mock_backend.hpp"

#include <sstream>
#include <thread>

#include "truekit/rubric.hpp"

namespace truekit {

namespace {

// First "<header> <token>" line in the prompt, e.g. "Topic: 42".
std::optional<std::string> find_header(const std::string& text, const std::string& header) {
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind(header, 0) == 0) {
            std::string value = trim(line.substr(header.size()));
            if (!value.empty()) return value;
        }
    }
    return std::nullopt;
}

std::optional<TaskKey> find_task(const std::string& prompt) {
    auto topic = find_header(prompt, "Topic:");
    auto doc = find_header(prompt, "Document:");
    if (!topic || !doc) return std::nullopt;
    return TaskKey{*topic, *doc};
}

std::string judge_answer(RelevanceLabel label, bool with_dimensions) {
    std::ostringstream out;
    out << "Considering the rubric rules for this pair:\n\n```\n";
    if (with_dimensions) {
        out << "INTENT_ALIGNMENT: The passage matches the query intent at level "
            << label.value() << ".\n"
            << "COVERAGE: The passage covers the information need at level "
            << label.value() << ".\n"
            << "SPECIFICITY: The passage is specific to the query at level "
            << label.value() << ".\n"
            << "ACCURACY: The passage content is accurate at level " << label.value()
            << ".\n"
            << "USEFULNESS: The passage is useful to the searcher at level "
            << label.value() << ".\n";
    }
    out << "FINAL_LABEL: " << label.value() << "\n```\n";
    return out.str();
}

}  // namespace

MockBackend::MockBackend(MockBackendOptions options) : options_(std::move(options)) {
    if (options_.canned_rubric_json.empty()) {
        options_.canned_rubric_json = rubric_rules_to_json(make_reference_rubric().rules());
    }
    if (options_.rubric_responses.empty()) {
        options_.rubric_responses.push_back("```json\n" + options_.canned_rubric_json +
                                            "\n```\n");
    }
}

CompletionResponse MockBackend::complete(const CompletionRequest& request) {
    request.validate();
    calls_.fetch_add(1);
    const int now = in_flight_.fetch_add(1) + 1;
    int seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }
    if (options_.delay.count() > 0) std::this_thread::sleep_for(options_.delay);

    CompletionResponse response;
    response.model_id = request.model_id;
    response.text = answer(request);
    in_flight_.fetch_sub(1);
    return response;
}

std::string MockBackend::answer(const CompletionRequest& request) {
    const std::string& prompt = request.user_prompt;

    // Phase checks run most-specific first: the synthesis marker is template
    // instruction text, while rationales quoted inside a synthesis prompt may
    // mention anything.
    if (prompt.find("Return the rubric as JSON") != std::string::npos) {
        std::lock_guard lock(rubric_mutex_);
        const std::size_t index =
            std::min(rubric_calls_, options_.rubric_responses.size() - 1);
        ++rubric_calls_;
        return options_.rubric_responses[index];
    }

    if (prompt.find("FINAL_LABEL") != std::string::npos) {
        const bool with_dimensions =
            prompt.find("INTENT_ALIGNMENT") != std::string::npos;
        auto task = find_task(prompt);
        if (!task) return judge_answer(RelevanceLabel(0), with_dimensions);
        if (options_.garbage_tasks.count(*task)) {
            return "The passage defies classification on this scale.\n";
        }
        auto it = options_.oracle.find(*task);
        const RelevanceLabel label =
            it != options_.oracle.end() ? it->second : RelevanceLabel(0);
        return judge_answer(label, with_dimensions);
    }

    if (prompt.find("Assigned relevance label:") != std::string::npos) {
        auto task = find_task(prompt);
        auto label = find_header(prompt, "Assigned relevance label:");
        std::ostringstream out;
        out << "The passage " << (task ? task->second : std::string("(unknown)"))
            << " earned label " << (label ? *label : std::string("?")) << " for topic "
            << (task ? task->first : std::string("(unknown)"))
            << ": its intent alignment, coverage, specificity, accuracy and "
               "usefulness all sit at that level of the scale.\n";
        return out.str();
    }

    return "Understood.\n";
}

std::map<TaskKey, RelevanceLabel> oracle_from_qrels(const Qrels& qrels) {
    std::map<TaskKey, RelevanceLabel> oracle;
    for (const auto& [topic, docs] : qrels.topics()) {
        for (const auto& [doc, label] : docs) {
            oracle.emplace(TaskKey{topic, doc}, label);
        }
    }
    return oracle;
}

}  // namespace truekit
