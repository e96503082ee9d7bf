#pragma once

// Question-grounded 1-hop retrieval over the causal graph. Keywords from the
// question select anchor nodes; every outgoing edge of an anchor becomes a
// candidate fact scored by anchor degree centrality with a multiplicative
// boost when the relation uses kinetic (change-denoting) terminology. The
// top-k facts render into a prompt context block.

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ckg/errors.hpp"
#include "ckg/graph.hpp"
#include "ckg/text.hpp"

namespace ckg {

enum class CentralityMode { total_degree, out_degree };

inline const std::vector<std::string>& default_kinetic_lexicon() {
    static const std::vector<std::string> terms = {
        "increase", "increased", "decrease", "decreased", "shift",  "shifted", "change",
        "changed",  "rise",      "drop",     "faster",    "slower", "louder",  "quieter"};
    return terms;
}

inline const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = {
        "about", "after",  "and",   "are",    "because", "before", "being",  "between",
        "but",   "can",    "could", "did",    "does",    "doing",  "down",   "during",
        "each",  "for",    "from",  "had",    "has",     "have",   "how",    "into",
        "its",   "just",   "may",   "might",  "more",    "most",   "must",   "not",
        "now",   "off",    "once",  "only",   "onto",    "our",    "out",    "over",
        "same",  "shall",  "she",   "should", "some",    "soon",   "such",   "than",
        "that",  "the",    "their", "them",   "then",    "there",  "these",  "they",
        "this",  "those",  "through", "too",  "under",   "until",  "upon",   "very",
        "was",   "were",   "what",  "when",   "where",   "which",  "while",  "who",
        "whom",  "why",    "will",  "with",   "would",   "you",    "your"};
    return words;
}

struct RetrievalConfig {
    std::size_t k = 25;  // context budget: 25 suits VLM prompts, 3 thinking LLMs
    std::vector<std::string> kinetic_lexicon = default_kinetic_lexicon();
    double boost_factor = 1.5;
    std::set<std::string> stopwords = default_stopwords();
    std::size_t min_keyword_length = 3;
    CentralityMode centrality = CentralityMode::total_degree;
};

struct RankedFact {
    int edge_id = 0;
    int anchor_node_id = 0;
    std::string source_label;
    std::string relation;
    std::string target_label;
    double base_weight = 0.0;  // anchor degree centrality
    bool boosted = false;
    double score = 0.0;
};

inline void validate_config(const RetrievalConfig& config) {
    if (config.k < 1) throw std::invalid_argument("retrieval k must be >= 1");
    if (!(config.boost_factor > 0)) throw std::invalid_argument("boost_factor must be > 0");
    for (const std::string& term : config.kinetic_lexicon) {
        if (term.empty()) throw std::invalid_argument("kinetic lexicon contains an empty term");
    }
    for (const std::string& word : config.stopwords) {
        if (word.empty()) throw std::invalid_argument("stopword set contains an empty term");
    }
}

// Lowercase alphanumeric tokens of length >= min_keyword_length with
// stopwords dropped and duplicates removed (first occurrence wins), followed
// by the contiguous 2-grams of those surviving tokens.
inline std::vector<std::string> extract_keywords(std::string_view question,
                                                 const RetrievalConfig& config) {
    std::vector<std::string> survivors;
    std::unordered_set<std::string> seen;
    for (std::string& token : tokenize_lower_alnum(question)) {
        if (token.size() < config.min_keyword_length) continue;
        if (config.stopwords.count(token)) continue;
        if (!seen.insert(token).second) continue;
        survivors.push_back(std::move(token));
    }
    std::vector<std::string> keywords = survivors;
    for (std::size_t i = 0; i + 1 < survivors.size(); ++i) {
        keywords.push_back(survivors[i] + " " + survivors[i + 1]);
    }
    return keywords;
}

// Node ids whose canonical label contains any keyword as a substring at
// token boundaries ("pop" matches "genre: pop", not "popular ballad").
// Returned ascending by node id.
inline std::vector<int> match_anchors(const CausalGraph& graph,
                                      const std::vector<std::string>& keywords) {
    std::vector<int> anchors;
    for (const NodeRecord& node : graph.nodes()) {
        for (const std::string& kw : keywords) {
            if (contains_bounded(node.label, kw)) {
                anchors.push_back(node.id);
                break;
            }
        }
    }
    return anchors;
}

inline RankedFact score_fact(const CausalGraph& graph, int anchor_id, const EdgeRecord& edge,
                             const RetrievalConfig& config) {
    if (graph.node_count() < 2) {
        throw DegenerateGraph("degree centrality requires at least 2 nodes");
    }
    if (edge.from != anchor_id) {
        throw std::invalid_argument("score_fact: edge does not originate at the anchor");
    }
    const double degree =
        config.centrality == CentralityMode::total_degree
            ? static_cast<double>(graph.in_degree(anchor_id) + graph.out_degree(anchor_id))
            : static_cast<double>(graph.out_degree(anchor_id));
    const double base_weight = degree / static_cast<double>(graph.node_count() - 1);

    // Plain substring containment, unlike anchor matching: "increases"
    // carries the kinetic term "increase" even though it is not a whole
    // token.
    const std::string relation_folded = to_lower(edge.relation);
    bool boosted = false;
    for (const std::string& term : config.kinetic_lexicon) {
        if (relation_folded.find(term) != std::string::npos) {
            boosted = true;
            break;
        }
    }

    RankedFact fact;
    fact.edge_id = edge.id;
    fact.anchor_node_id = anchor_id;
    fact.source_label = graph.node(edge.from).label;
    fact.relation = edge.relation;
    fact.target_label = graph.node(edge.to).label;
    fact.base_weight = base_weight;
    fact.boosted = boosted;
    fact.score = boosted ? base_weight * config.boost_factor : base_weight;
    return fact;
}

// Full retrieval pass: keywords -> anchors -> one hop over outgoing edges ->
// score -> deterministic sort -> top-k. An edge reachable from several
// anchors keeps its highest-scoring occurrence. Never throws for degenerate
// questions; a graph too small for centrality yields no facts.
inline std::vector<RankedFact> retrieve(const CausalGraph& graph, std::string_view question,
                                        const RetrievalConfig& config) {
    validate_config(config);
    if (graph.node_count() < 2) return {};
    const std::vector<std::string> keywords = extract_keywords(question, config);
    if (keywords.empty()) return {};
    const std::vector<int> anchors = match_anchors(graph, keywords);

    std::vector<RankedFact> facts;
    std::unordered_map<int, std::size_t> fact_by_edge;
    for (int anchor : anchors) {
        for (int edge_id : graph.out_edge_ids(anchor)) {
            RankedFact fact = score_fact(graph, anchor, graph.edge(edge_id), config);
            auto [it, inserted] = fact_by_edge.emplace(edge_id, facts.size());
            if (inserted) {
                facts.push_back(std::move(fact));
            } else if (fact.score > facts[it->second].score) {
                facts[it->second] = std::move(fact);
            }
        }
    }
    std::sort(facts.begin(), facts.end(), [](const RankedFact& a, const RankedFact& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.source_label != b.source_label) return a.source_label < b.source_label;
        if (a.target_label != b.target_label) return a.target_label < b.target_label;
        return a.edge_id < b.edge_id;
    });
    if (facts.size() > config.k) facts.resize(config.k);
    return facts;
}

// One line per fact in rank order; the empty list renders a fixed sentinel.
inline std::string render_context(const std::vector<RankedFact>& facts) {
    if (facts.empty()) return "no causal facts retrieved";
    std::string out;
    char score_buf[32];
    for (std::size_t i = 0; i < facts.size(); ++i) {
        const RankedFact& f = facts[i];
        if (i > 0) out.push_back('\n');
        std::snprintf(score_buf, sizeof(score_buf), "%.4f", f.score);
        out += "- [score=";
        out += score_buf;
        out += "] ";
        out += f.source_label;
        out += " --(";
        out += f.relation;
        out += ")--> ";
        out += f.target_label;
    }
    return out;
}

// One lowercase term per line; blank lines ignored.
inline std::vector<std::string> load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path.string());
    std::vector<std::string> terms;
    std::string line;
    while (std::getline(in, line)) {
        std::string term = to_lower(trim(line));
        if (!term.empty()) terms.push_back(std::move(term));
    }
    return terms;
}

}  // namespace ckg
