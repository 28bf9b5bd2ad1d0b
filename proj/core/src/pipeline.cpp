#include "truekit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <random>
#include <sstream>
#include <thread>

namespace truekit {

namespace {

constexpr int kFormatRetries = 3;

std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t min = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= min) return r % n;
    }
}

std::string lower_alnum(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

// Canonical dimension name for a normalized header key, if it is one.
std::optional<std::string> canonical_dimension(const std::string& key) {
    for (auto dim : kRubricDimensions) {
        if (key == lower_alnum(dim)) return std::string(dim);
    }
    return std::nullopt;
}

// All integers embedded in a final-label value such as "2", "**3**" or "<0-3>".
std::vector<int> embedded_integers(const std::string& value) {
    std::vector<int> out;
    std::size_t i = 0;
    while (i < value.size()) {
        if (std::isdigit(static_cast<unsigned char>(value[i]))) {
            int v = 0;
            while (i < value.size() && std::isdigit(static_cast<unsigned char>(value[i]))) {
                v = v * 10 + (value[i] - '0');
                ++i;
            }
            out.push_back(v);
        } else {
            ++i;
        }
    }
    return out;
}

RelevanceLabel parse_final_label(const std::string& value) {
    const auto ints = embedded_integers(value);
    if (ints.empty()) {
        throw ParseError("malformed final label '" + value + "'");
    }
    if (ints.size() > 1) {
        throw ParseError("ambiguous final label '" + value + "'");
    }
    auto label = RelevanceLabel::parse(ints.front());
    if (!label) {
        throw ParseError("final label out of range: " + std::to_string(ints.front()));
    }
    return *label;
}

std::string format_reminder(JudgeMode mode, int attempt) {
    std::string reminder =
        "\nFormat reminder " + std::to_string(attempt) +
        ": end your answer with a fenced code block whose last line is "
        "FINAL_LABEL: <0-3>.";
    if (mode == JudgeMode::Reasoning) {
        reminder +=
            " Put one line per rubric dimension (INTENT_ALIGNMENT, COVERAGE, "
            "SPECIFICITY, ACCURACY, USEFULNESS) before it.";
    }
    return reminder + "\n";
}

// First fenced block that looks like a JSON object, else the outermost braces.
std::string extract_json_object(const std::string& text) {
    std::size_t pos = 0;
    while ((pos = text.find("```", pos)) != std::string::npos) {
        const auto body_start = text.find('\n', pos);
        if (body_start == std::string::npos) break;
        const auto end = text.find("```", body_start);
        if (end == std::string::npos) break;
        std::string body = text.substr(body_start + 1, end - body_start - 1);
        if (!trim(body).empty() && trim(body).front() == '{') return body;
        pos = end + 3;
    }
    const auto open = text.find('{');
    const auto close = text.rfind('}');
    if (open != std::string::npos && close != std::string::npos && close > open) {
        return text.substr(open, close - open + 1);
    }
    throw ParseError("no JSON object found in rubric response");
}

JudgmentRecord judge_task(const JudgingTask& task, const Rubric& rubric,
                          const RoleBinding& judge, JudgeMode mode,
                          const PromptLibrary& prompts) {
    judge.require(BackendRole::Judge);
    const auto& tpl = prompts.get(mode == JudgeMode::Direct ? PromptPhase::JudgeDirect
                                                            : PromptPhase::JudgeReasoning);
    const std::map<std::string, std::string> vars{
        {"rubric", render_rubric_text(rubric)}, {"topic_id", task.topic},
        {"doc_id", task.doc},                   {"query", task.query},
        {"passage", task.passage},
    };
    const std::string base = render_prompt(tpl.user, vars);

    std::string last_error;
    for (int attempt = 0; attempt <= kFormatRetries; ++attempt) {
        std::string user = base;
        if (attempt > 0) user += format_reminder(mode, attempt);
        const auto request = judge.make_request(tpl.system, user);
        const auto response = judge.backend->complete(request);
        try {
            auto parsed = parse_judgment(response.text, mode);
            JudgmentRecord record;
            record.topic = task.topic;
            record.doc = task.doc;
            record.label = parsed.label;
            record.dimension_rationales = std::move(parsed.dimension_rationales);
            record.raw_output = response.text;
            record.prompt_hash = cache_key(request);
            record.mode = mode;
            record.model_id = judge.model_id;
            return record;
        } catch (const ParseError& e) {
            last_error = e.what();
        }
    }
    throw ParseError("task (" + task.topic + ", " + task.doc +
                     "): unparseable judgment after " +
                     std::to_string(kFormatRetries + 1) + " attempts: " + last_error);
}

}  // namespace

std::vector<JudgingTask> Sample::all() const {
    std::vector<JudgingTask> out;
    out.reserve(size());
    for (const auto& group : groups) {
        out.insert(out.end(), group.begin(), group.end());
    }
    return out;
}

std::size_t Sample::size() const {
    std::size_t n = 0;
    for (const auto& group : groups) n += group.size();
    return n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Sample stratified_sample(const std::vector<JudgingTask>& tasks, int per_label_n,
                         std::uint64_t seed) {
    if (per_label_n < 1) throw ValidationError("per-label-n must be >= 1");

    std::vector<JudgingTask> sorted = tasks;
    std::sort(sorted.begin(), sorted.end(), [](const JudgingTask& a, const JudgingTask& b) {
        return std::tie(a.topic, a.doc) < std::tie(b.topic, b.doc);
    });

    std::array<std::vector<JudgingTask>, 4> strata;
    for (auto& task : sorted) {
        if (!task.gold) {
            throw ValidationError("task (" + task.topic + ", " + task.doc +
                                  ") carries no gold label; sampling needs labeled tasks");
        }
        strata[static_cast<std::size_t>(task.gold->value())].push_back(std::move(task));
    }

    Sample sample;
    sample.seed = seed;
    sample.per_label_n = per_label_n;
    for (int value = 0; value <= 3; ++value) {
        auto& stratum = strata[static_cast<std::size_t>(value)];
        if (stratum.empty()) {
            throw ValidationError("no tasks with label " + std::to_string(value) +
                                  "; every stratum needs at least one task");
        }
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(value)));
        const std::size_t take =
            std::min<std::size_t>(static_cast<std::size_t>(per_label_n), stratum.size());
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + bounded_rand(rng, stratum.size() - i);
            std::swap(stratum[i], stratum[j]);
        }
        auto& group = sample.groups[static_cast<std::size_t>(value)];
        group.assign(std::make_move_iterator(stratum.begin()),
                     std::make_move_iterator(stratum.begin() + static_cast<long>(take)));
        sample.shortfall[static_cast<std::size_t>(value)] =
            per_label_n - static_cast<int>(take);
    }
    return sample;
}

ReasoningOutcome generate_reasoning(const Sample& sample, const RoleBinding& reasoning,
                                    const PromptLibrary& prompts) {
    reasoning.require(BackendRole::Reasoning);
    const auto& tpl = prompts.get(PromptPhase::Reasoning);

    ReasoningOutcome outcome;
    outcome.set.model_id = reasoning.model_id;
    for (const auto& group : sample.groups) {
        for (const auto& task : group) {
            const std::map<std::string, std::string> vars{
                {"topic_id", task.topic},
                {"doc_id", task.doc},
                {"query", task.query},
                {"passage", task.passage},
                {"label", std::to_string(task.gold->value())},
                {"label_name", std::string(task.gold->name())},
            };
            const auto request =
                reasoning.make_request(tpl.system, render_prompt(tpl.user, vars));
            const auto response = reasoning.backend->complete(request);
            if (trim(response.text).empty()) {
                outcome.failures.push_back(
                    {task.topic, task.doc, "empty reasoning response"});
            } else {
                outcome.set.rationales.push_back({task, response.text});
            }
        }
    }
    return outcome;
}

Rubric synthesize_rubric(const ReasoningSet& reasoning,
                         const std::optional<Rubric>& prior,
                         const RoleBinding& reasoning_binding,
                         const PromptLibrary& prompts) {
    reasoning_binding.require(BackendRole::Reasoning);
    if (reasoning.rationales.empty()) {
        throw ValidationError("cannot synthesize a rubric from an empty reasoning set");
    }
    const auto& tpl = prompts.get(PromptPhase::RubricSynthesis);

    std::ostringstream blocks;
    for (const auto& rationale : reasoning.rationales) {
        if (!rationale.task.gold) {
            throw ValidationError("rationale for (" + rationale.task.topic + ", " +
                                  rationale.task.doc + ") carries no gold label");
        }
        blocks << "Topic: " << rationale.task.topic << '\n'
               << "Document: " << rationale.task.doc << '\n'
               << "Label: " << rationale.task.gold->value() << '\n'
               << "Explanation: " << trim(rationale.text) << "\n\n";
    }
    std::string prior_section;
    if (prior) {
        prior_section = "\nCurrent rubric to revise and improve:\n```json\n" +
                        rubric_rules_to_json(prior->rules()) + "\n```\n";
    }
    const std::map<std::string, std::string> vars{
        {"rationales", blocks.str()},
        {"prior_rubric_section", prior_section},
    };
    const std::string base = render_prompt(tpl.user, vars);

    std::string last_error;
    for (int attempt = 0; attempt <= kFormatRetries; ++attempt) {
        std::string user = base;
        if (attempt > 0) {
            user += "\nFormat reminder " + std::to_string(attempt) +
                    ": return the rubric as a JSON object with keys \"0\" to \"3\", "
                    "each holding the five dimension arrays, inside one fenced code "
                    "block.\n";
        }
        const auto request = reasoning_binding.make_request(tpl.system, user);
        const auto response = reasoning_binding.backend->complete(request);
        try {
            auto rules = rubric_rules_from_json(extract_json_object(response.text));
            RubricProvenance provenance;
            provenance.model = reasoning_binding.model_id;
            provenance.iterations = reasoning.iteration;
            return Rubric(std::move(rules), std::move(provenance));
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    throw ParseError("unparseable rubric after " + std::to_string(kFormatRetries + 1) +
                     " attempts: " + last_error);
}

RefineResult refine_until_stable(const std::vector<JudgingTask>& tasks,
                                 const RoleBinding& reasoning,
                                 const PromptLibrary& prompts,
                                 const RefineOptions& options) {
    if (options.max_iterations < 1) {
        throw ValidationError("max-iterations must be >= 1");
    }
    if (!(options.stability_threshold > 0.0) || options.stability_threshold > 1.0) {
        throw ValidationError("stability-threshold must be in (0, 1]");
    }

    std::optional<Rubric> current;
    std::vector<RefineIteration> log;
    std::string stop_reason = "max-iterations reached";
    int iterations = 0;

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        // A fresh sample each round limits how much of the dataset any single
        // prompt exposes.
        const auto sample = stratified_sample(
            tasks, options.per_label_n,
            derive_seed(options.seed, static_cast<std::uint64_t>(iter)));
        auto outcome = generate_reasoning(sample, reasoning, prompts);
        outcome.set.iteration = iter;
        auto rubric = synthesize_rubric(outcome.set, current, reasoning, prompts);

        RefineIteration entry;
        entry.iteration = iter;
        entry.reasoning_failures = outcome.failures.size();
        iterations = iter;

        bool stable = false;
        if (current) {
            const double similarity = rubric_similarity(*current, rubric);
            entry.similarity = similarity;
            stable = similarity >= options.stability_threshold;
        }
        log.push_back(entry);
        current = std::move(rubric);
        if (stable) {
            std::ostringstream reason;
            reason << "stable: similarity " << *entry.similarity << " >= threshold "
                   << options.stability_threshold;
            stop_reason = reason.str();
            break;
        }
    }

    current->set_provenance(RubricProvenance{reasoning.model_id, options.seed,
                                             options.dataset_tag, iterations});
    return RefineResult{std::move(*current), std::move(log), std::move(stop_reason)};
}

std::string_view judge_mode_name(JudgeMode mode) {
    return mode == JudgeMode::Direct ? "direct" : "reasoning";
}

JudgeMode parse_judge_mode(std::string_view name) {
    if (name == "direct") return JudgeMode::Direct;
    if (name == "reasoning") return JudgeMode::Reasoning;
    throw ValidationError("unknown judge mode '" + std::string(name) +
                          "' (expected 'direct' or 'reasoning')");
}

JudgmentRecord judge_direct(const JudgingTask& task, const Rubric& rubric,
                            const RoleBinding& judge, const PromptLibrary& prompts) {
    return judge_task(task, rubric, judge, JudgeMode::Direct, prompts);
}

JudgmentRecord judge_with_reasoning(const JudgingTask& task, const Rubric& rubric,
                                    const RoleBinding& judge,
                                    const PromptLibrary& prompts) {
    return judge_task(task, rubric, judge, JudgeMode::Reasoning, prompts);
}

BatchJudgeResult batch_judge(const std::vector<JudgingTask>& tasks, const Rubric& rubric,
                             const RoleBinding& judge, JudgeMode mode, int parallelism,
                             const PromptLibrary& prompts) {
    if (parallelism < 1) throw ValidationError("parallelism must be >= 1");
    judge.require(BackendRole::Judge);

    std::vector<std::optional<JudgmentRecord>> records(tasks.size());
    std::vector<std::optional<TaskFailure>> failures(tasks.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                records[i] = judge_task(tasks[i], rubric, judge, mode, prompts);
            } catch (const Error& e) {
                failures[i] = TaskFailure{tasks[i].topic, tasks[i].doc, e.what()};
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(parallelism), tasks.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    // Aggregation is keyed by (topic, doc), so the result does not depend on
    // completion order.
    BatchJudgeResult result;
    for (auto& record : records) {
        if (record) result.records.push_back(std::move(*record));
    }
    std::sort(result.records.begin(), result.records.end(),
              [](const JudgmentRecord& a, const JudgmentRecord& b) {
                  return std::tie(a.topic, a.doc) < std::tie(b.topic, b.doc);
              });
    for (auto& failure : failures) {
        if (failure) result.failures.push_back(std::move(*failure));
    }
    std::sort(result.failures.begin(), result.failures.end(),
              [](const TaskFailure& a, const TaskFailure& b) {
                  return std::tie(a.topic, a.doc) < std::tie(b.topic, b.doc);
              });
    for (const auto& record : result.records) {
        result.qrels.add(record.topic, record.doc, record.label);
    }
    return result;
}

ParsedJudgment parse_judgment(const std::string& raw, JudgeMode mode) {
    std::istringstream ss(raw);
    std::string line;
    std::optional<std::string> final_value;
    std::optional<std::string> fallback_value;
    std::map<std::string, std::string> dims;
    std::string* current_dim = nullptr;

    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.rfind("```", 0) == 0) {
            current_dim = nullptr;
            continue;
        }
        bool handled = false;
        const auto colon = line.find(':');
        if (colon != std::string::npos) {
            const std::string key = lower_alnum(std::string_view(line).substr(0, colon));
            std::string value = trim(std::string_view(line).substr(colon + 1));
            if (key == "finallabel") {
                final_value = std::move(value);
                current_dim = nullptr;
                handled = true;
            } else if (key == "label") {
                fallback_value = std::move(value);
                current_dim = nullptr;
                handled = true;
            } else if (auto dim = canonical_dimension(key)) {
                auto [it, inserted] = dims.insert_or_assign(*dim, std::move(value));
                current_dim = &it->second;
                handled = true;
            }
        }
        if (!handled && current_dim && !stripped.empty()) {
            if (!current_dim->empty()) current_dim->push_back(' ');
            *current_dim += stripped;
        }
    }

    const std::optional<std::string>& value = final_value ? final_value : fallback_value;
    if (!value) {
        throw ParseError("no final label found in judgment output");
    }

    ParsedJudgment parsed;
    parsed.label = parse_final_label(*value);
    if (mode == JudgeMode::Reasoning) {
        for (auto dim : kRubricDimensions) {
            auto it = dims.find(std::string(dim));
            if (it == dims.end() || trim(it->second).empty()) {
                throw ParseError("missing dimension '" + std::string(dim) +
                                 "' in judgment output");
            }
        }
        parsed.dimension_rationales = std::move(dims);
    }
    return parsed;
}

}  // namespace truekit
