#pragma once

// MCQ evaluation harness: question/evidence loading, deterministic prompt
// assembly with optional causal grounding and scene-B audio masking, answer
// parsing, pluggable model clients, and per-category scoring.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ckg/csv.hpp"
#include "ckg/errors.hpp"
#include "ckg/graph.hpp"
#include "ckg/retrieval.hpp"
#include "ckg/text.hpp"

namespace ckg {

enum class Category { evidence_reasoning, prediction, counterfactual };

// Case-folds and treats spaces/hyphens as underscores, so "Prediction" and
// "evidence-reasoning" both resolve.
inline std::optional<Category> parse_category(std::string_view text) {
    std::string folded;
    folded.reserve(text.size());
    for (char c : trim(text)) {
        folded.push_back(c == ' ' || c == '-' ? '_' : ascii_lower(c));
    }
    if (folded == "evidence_reasoning") return Category::evidence_reasoning;
    if (folded == "prediction") return Category::prediction;
    if (folded == "counterfactual") return Category::counterfactual;
    return std::nullopt;
}

inline const char* category_name(Category category) {
    switch (category) {
        case Category::evidence_reasoning: return "evidence_reasoning";
        case Category::prediction: return "prediction";
        default: return "counterfactual";
    }
}

struct MCQItem {
    std::string item_id;
    std::string transition_id;
    Category category = Category::evidence_reasoning;
    std::string question;
    std::vector<std::string> options;  // exactly 4
    int correct_index = 0;
};

struct McqLoadResult {
    std::vector<MCQItem> items;
    std::vector<RejectedRecord> rejections;
};

// JSONL, one item per line; invalid rows are rejected with line-numbered
// diagnostics instead of aborting the load.
inline McqLoadResult load_mcq(std::istream& in) {
    McqLoadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        auto reject = [&](const std::string& reason) {
            result.rejections.push_back({line_no, reason});
        };
        if (doc.is_discarded() || !doc.is_object()) {
            reject("not a JSON object");
            continue;
        }
        auto text_field = [&](const char* key) -> std::optional<std::string> {
            if (!doc.contains(key) || !doc[key].is_string()) return std::nullopt;
            return doc[key].get<std::string>();
        };
        const auto item_id = text_field("item_id");
        const auto transition_id = text_field("transition_id");
        const auto category_text = text_field("category");
        const auto question = text_field("question");
        if (!item_id || !transition_id || !category_text || !question) {
            reject("missing or non-string item_id/transition_id/category/question");
            continue;
        }
        const auto category = parse_category(*category_text);
        if (!category) {
            reject("unknown category \"" + *category_text + "\"");
            continue;
        }
        if (!doc.contains("options") || !doc["options"].is_array() || doc["options"].size() != 4) {
            reject("options must be an array of exactly 4 texts");
            continue;
        }
        MCQItem item;
        bool options_ok = true;
        for (const auto& option : doc["options"]) {
            if (!option.is_string()) {
                options_ok = false;
                break;
            }
            item.options.push_back(option.get<std::string>());
        }
        if (!options_ok) {
            reject("options must be an array of exactly 4 texts");
            continue;
        }
        if (!doc.contains("correct_index") || !doc["correct_index"].is_number_integer()) {
            reject("missing or non-integer correct_index");
            continue;
        }
        const auto correct = doc["correct_index"].get<std::int64_t>();
        if (correct < 0 || correct > 3) {
            reject("correct_index " + std::to_string(correct) + " out of range [0,3]");
            continue;
        }
        item.item_id = *item_id;
        item.transition_id = *transition_id;
        item.category = *category;
        item.question = *question;
        item.correct_index = static_cast<int>(correct);
        result.items.push_back(std::move(item));
    }
    return result;
}

inline McqLoadResult load_mcq(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open MCQ file " + path);
    return load_mcq(in);
}

struct TransitionEvidence {
    std::string transition_id;
    std::map<std::string, double> scene_a;
    std::map<std::string, double> scene_b;
    std::map<std::string, double> deltas;
};

// JSONL keyed by transition_id with scene_a/scene_b/deltas numeric objects.
inline std::map<std::string, TransitionEvidence> load_evidence(std::istream& in) {
    std::map<std::string, TransitionEvidence> store;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        const std::string where = "evidence line " + std::to_string(line_no);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("transition_id") ||
            !doc["transition_id"].is_string()) {
            throw SchemaViolation(where + ": expected an object with a transition_id string");
        }
        TransitionEvidence evidence;
        evidence.transition_id = doc["transition_id"].get<std::string>();
        auto numeric_map = [&](const char* key) {
            std::map<std::string, double> values;
            if (!doc.contains(key)) return values;
            if (!doc[key].is_object()) {
                throw SchemaViolation(where + ": " + key + " must be an object");
            }
            for (const auto& [name, value] : doc[key].items()) {
                if (!value.is_number()) {
                    throw SchemaViolation(where + ": " + key + "." + name + " is not numeric");
                }
                values.emplace(name, value.get<double>());
            }
            return values;
        };
        evidence.scene_a = numeric_map("scene_a");
        evidence.scene_b = numeric_map("scene_b");
        evidence.deltas = numeric_map("deltas");
        for (const auto& [name, value] : evidence.deltas) {
            (void)value;
            if (!evidence.scene_a.count(name) && !evidence.scene_b.count(name)) {
                throw SchemaViolation(where + ": delta key \"" + name +
                                      "\" absent from both scene feature maps");
            }
        }
        if (store.count(evidence.transition_id)) {
            throw SchemaViolation(where + ": duplicate transition_id \"" +
                                  evidence.transition_id + "\"");
        }
        store.emplace(evidence.transition_id, std::move(evidence));
    }
    return store;
}

inline std::map<std::string, TransitionEvidence> load_evidence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open evidence file " + path);
    return load_evidence(in);
}

inline const std::set<std::string>& default_visual_feature_names() {
    static const std::set<std::string> names{"motion",     "brightness",   "contrast",
                                             "saturation", "tvi",          "object_count"};
    return names;
}

struct EvalConfig {
    bool use_ckg = false;
    RetrievalConfig retrieval;
    bool mask_scene_b_audio = true;
    std::string prompt_template_id = "default";
    std::uint64_t seed = 0;
    int retry_limit = 2;
    int jobs = 1;
    // Feature names treated as visual; everything else counts as audio for
    // the prediction-masking rule.
    std::set<std::string> visual_feature_names = default_visual_feature_names();
};

inline constexpr const char* kMaskedValue = "[MASKED]";

namespace detail {

inline std::string format_feature_value(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

inline void render_feature_map(std::string& out, const char* heading,
                               const std::map<std::string, double>& values, bool mask_audio,
                               const std::set<std::string>& visual_names) {
    out += heading;
    out += ":\n";
    if (values.empty()) {
        out += "  (none)\n";
        return;
    }
    for (const auto& [name, value] : values) {
        out += "  ";
        out += name;
        out += '=';
        if (mask_audio && !visual_names.count(name)) {
            out += kMaskedValue;
        } else {
            out += format_feature_value(value);
        }
        out += '\n';
    }
}

}  // namespace detail

// Deterministic prompt with fixed section order. Grounded and ungrounded
// prompts are byte-identical except for the CAUSAL CONTEXT block. For
// prediction items with masking on, scene-B audio values (and their deltas,
// which would reveal them arithmetically) render as [MASKED].
inline std::string build_prompt(const MCQItem& item, const TransitionEvidence& evidence,
                                const std::optional<std::string>& context,
                                const EvalConfig& config) {
    if (config.use_ckg && !context) {
        throw MissingContext("grounded prompt for item \"" + item.item_id +
                             "\" requires retrieved causal context");
    }
    const bool mask = config.mask_scene_b_audio && item.category == Category::prediction;

    std::string prompt;
    prompt +=
        "You are answering a multiple-choice question about a music-video scene "
        "transition.\nUse the transition evidence and any provided causal context to "
        "choose the single best option.\nThink step by step, then state your answer.\n";
    prompt += "\nTRANSITION EVIDENCE (";
    prompt += evidence.transition_id;
    prompt += "):\n";
    detail::render_feature_map(prompt, "scene_a", evidence.scene_a, false,
                               config.visual_feature_names);
    detail::render_feature_map(prompt, "scene_b", evidence.scene_b, mask,
                               config.visual_feature_names);
    detail::render_feature_map(prompt, "deltas", evidence.deltas, mask,
                               config.visual_feature_names);
    if (config.use_ckg) {
        prompt += "\nCAUSAL CONTEXT:\n";
        prompt += *context;
        prompt += '\n';
    }
    prompt += "\nQUESTION:\n";
    prompt += item.question;
    prompt += "\n\nOPTIONS:\n";
    for (std::size_t i = 0; i < item.options.size(); ++i) {
        prompt += static_cast<char>('A' + i);
        prompt += ". ";
        prompt += item.options[i];
        prompt += '\n';
    }
    prompt += "\nAnswer with a single letter A-D.\n";
    return prompt;
}

// First token-bounded single letter A-D (either case) maps to 0-3. The
// bounding rule makes "Answer: B", "(C)", and a bare "d" all parse while
// letters inside words never do.
inline std::optional<int> parse_answer(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = ascii_lower(text[i]);
        if (c < 'a' || c > 'd') continue;
        const bool left_ok = i == 0 || !ascii_alnum(text[i - 1]);
        const bool right_ok = i + 1 == text.size() || !ascii_alnum(text[i + 1]);
        if (left_ok && right_ok) return c - 'a';
    }
    return std::nullopt;
}

class ModelClient {
  public:
    virtual ~ModelClient() = default;
    // May be called concurrently from several worker threads.
    virtual std::string answer(const std::string& prompt) = 0;
};

// Test-only client that always answers correctly. It recovers the question
// from the prompt's QUESTION section and looks up the answer key built at
// construction, so it exercises the real prompt/parse path.
class PerfectOracleClient : public ModelClient {
  public:
    explicit PerfectOracleClient(const std::vector<MCQItem>& items) {
        for (const MCQItem& item : items) {
            key_by_question_[item.question] = item.correct_index;
        }
    }

    std::string answer(const std::string& prompt) override {
        const std::string marker = "\nQUESTION:\n";
        const std::size_t start = prompt.find(marker);
        const std::size_t end = prompt.find("\n\nOPTIONS:\n");
        if (start == std::string::npos || end == std::string::npos || end < start) {
            throw ClientFailure("oracle cannot locate the question section");
        }
        const std::string question =
            prompt.substr(start + marker.size(), end - start - marker.size());
        const auto it = key_by_question_.find(question);
        if (it == key_by_question_.end()) {
            throw ClientFailure("oracle has no key for the presented question");
        }
        std::string reply = "Answer: ";
        reply += static_cast<char>('A' + it->second);
        return reply;
    }

  private:
    std::map<std::string, int> key_by_question_;
};

// Uniform choice over A-D derived by hashing (seed, prompt), so the picked
// letter is a pure function of the inputs and identical under any thread
// schedule or job count.
class UniformRandomClient : public ModelClient {
  public:
    explicit UniformRandomClient(std::uint64_t seed) : seed_(seed) {}

    std::string answer(const std::string& prompt) override {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
        auto mix_byte = [&h](unsigned char byte) {
            h ^= byte;
            h *= 1099511628211ull;  // FNV-1a prime
        };
        for (int shift = 0; shift < 64; shift += 8) {
            mix_byte(static_cast<unsigned char>(seed_ >> shift));
        }
        for (char c : prompt) mix_byte(static_cast<unsigned char>(c));
        // splitmix64 finalizer for avalanche
        h += 0x9e3779b97f4a7c15ull;
        h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
        h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
        h ^= h >> 31;
        std::string reply = "Answer: ";
        reply += static_cast<char>('A' + static_cast<int>(h % 4));
        return reply;
    }

  private:
    std::uint64_t seed_;
};

class FixedLetterClient : public ModelClient {
  public:
    explicit FixedLetterClient(char letter) : letter_(letter) {
        const char folded = ascii_lower(letter);
        if (folded < 'a' || folded > 'd') {
            throw std::invalid_argument("fixed letter must be one of A-D");
        }
        letter_ = static_cast<char>(folded - 'a' + 'A');
    }

    std::string answer(const std::string&) override { return std::string(1, letter_); }

  private:
    char letter_;
};

enum class ParseStatus { ok, unparseable, client_failure };

inline const char* parse_status_name(ParseStatus status) {
    switch (status) {
        case ParseStatus::ok: return "ok";
        case ParseStatus::unparseable: return "unparseable";
        default: return "client_failure";
    }
}

struct ItemOutcome {
    std::string item_id;
    Category category = Category::evidence_reasoning;
    std::optional<int> chosen;
    int correct_index = 0;
    bool is_correct = false;
    ParseStatus parse_status = ParseStatus::ok;
};

struct CategoryTally {
    std::size_t asked = 0;
    std::size_t answered = 0;  // got a parseable reply
    std::size_t correct = 0;

    double accuracy() const {
        return asked == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(asked);
    }
};

struct EvalReport {
    std::map<Category, CategoryTally> per_category;
    CategoryTally overall;
    std::size_t unparseable_responses = 0;
    std::size_t client_failures = 0;
    EvalConfig config;
    std::vector<ItemOutcome> outcomes;  // item order
};

// Runs every item through retrieve (when grounded) -> build_prompt ->
// client -> parse -> score. Items are distributed over config.jobs worker
// threads via a shared index; outcomes land in positional slots so the
// report never depends on completion order.
inline EvalReport evaluate(const std::vector<MCQItem>& items,
                           const std::map<std::string, TransitionEvidence>& evidence_store,
                           ModelClient& client, const CausalGraph* graph,
                           const EvalConfig& config) {
    if (config.use_ckg) {
        if (graph == nullptr) throw MissingContext("grounded evaluation requires a graph");
        validate_config(config.retrieval);
    }
    if (config.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (config.retry_limit < 0) throw std::invalid_argument("retry limit must be >= 0");
    for (const MCQItem& item : items) {
        if (!evidence_store.count(item.transition_id)) {
            throw SchemaViolation("item \"" + item.item_id + "\" references unknown transition \"" +
                                  item.transition_id + "\"");
        }
    }

    std::vector<ItemOutcome> outcomes(items.size());
    auto run_item = [&](std::size_t index) {
        const MCQItem& item = items[index];
        const TransitionEvidence& evidence = evidence_store.at(item.transition_id);
        std::optional<std::string> context;
        if (config.use_ckg) {
            context = render_context(retrieve(*graph, item.question, config.retrieval));
        }
        const std::string prompt = build_prompt(item, evidence, context, config);

        ItemOutcome outcome;
        outcome.item_id = item.item_id;
        outcome.category = item.category;
        outcome.correct_index = item.correct_index;
        std::optional<std::string> reply;
        for (int attempt = 0; attempt <= config.retry_limit && !reply; ++attempt) {
            try {
                reply = client.answer(prompt);
            } catch (const ClientFailure&) {
            }
        }
        if (!reply) {
            outcome.parse_status = ParseStatus::client_failure;
        } else {
            outcome.chosen = parse_answer(*reply);
            if (!outcome.chosen) {
                outcome.parse_status = ParseStatus::unparseable;
            } else {
                outcome.is_correct = *outcome.chosen == item.correct_index;
            }
        }
        outcomes[index] = std::move(outcome);
    };

    if (config.jobs == 1 || items.size() < 2) {
        for (std::size_t i = 0; i < items.size(); ++i) run_item(i);
    } else {
        std::atomic<std::size_t> next{0};
        const std::size_t width =
            std::min<std::size_t>(static_cast<std::size_t>(config.jobs), items.size());
        std::vector<std::thread> workers;
        workers.reserve(width);
        for (std::size_t w = 0; w < width; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < outcomes.size();
                     i = next.fetch_add(1)) {
                    run_item(i);
                }
            });
        }
        for (std::thread& worker : workers) worker.join();
    }

    EvalReport report;
    report.config = config;
    report.per_category[Category::evidence_reasoning];
    report.per_category[Category::prediction];
    report.per_category[Category::counterfactual];
    for (const ItemOutcome& outcome : outcomes) {
        CategoryTally& tally = report.per_category[outcome.category];
        ++tally.asked;
        ++report.overall.asked;
        if (outcome.parse_status == ParseStatus::ok) {
            ++tally.answered;
            ++report.overall.answered;
        } else if (outcome.parse_status == ParseStatus::unparseable) {
            ++report.unparseable_responses;
        } else {
            ++report.client_failures;
        }
        if (outcome.is_correct) {
            ++tally.correct;
            ++report.overall.correct;
        }
    }
    report.outcomes = std::move(outcomes);
    return report;
}

inline nlohmann::json tally_to_json(const CategoryTally& tally) {
    return {{"asked", tally.asked},
            {"answered", tally.answered},
            {"correct", tally.correct},
            {"accuracy", tally.accuracy()}};
}

inline nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json per_category;
    for (const auto& [category, tally] : report.per_category) {
        per_category[category_name(category)] = tally_to_json(tally);
    }
    return {{"overall", tally_to_json(report.overall)},
            {"per_category", per_category},
            {"unparseable_responses", report.unparseable_responses},
            {"client_failures", report.client_failures},
            {"config",
             {{"use_ckg", report.config.use_ckg},
              {"k", report.config.retrieval.k},
              {"mask_scene_b_audio", report.config.mask_scene_b_audio},
              {"prompt_template_id", report.config.prompt_template_id},
              {"seed", report.config.seed},
              {"retry_limit", report.config.retry_limit},
              {"jobs", report.config.jobs}}}};
}

inline void write_audit_csv(std::ostream& out, const std::vector<ItemOutcome>& outcomes) {
    out << "item_id,category,chosen,correct,is_correct,parse_status\n";
    for (const ItemOutcome& outcome : outcomes) {
        std::vector<std::string> row{
            outcome.item_id,
            category_name(outcome.category),
            outcome.chosen ? std::string(1, static_cast<char>('A' + *outcome.chosen)) : "",
            std::string(1, static_cast<char>('A' + outcome.correct_index)),
            outcome.is_correct ? "true" : "false",
            parse_status_name(outcome.parse_status)};
        csv_write_row(out, row);
    }
}

inline void write_audit_csv(const std::string& path, const std::vector<ItemOutcome>& outcomes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    write_audit_csv(out, outcomes);
}

}  // namespace ckg
