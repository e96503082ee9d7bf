#pragma once

// Directed causal knowledge graph built from (source, relation, target)
// triplets. Nodes are canonicalized visual-change / music-state labels;
// edges point from cause to effect. Duplicate triplets fold into one edge
// with a multiplicity counter. Construction is single-writer; afterwards the
// graph is immutable and safe to share across reader threads.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ckg/errors.hpp"
#include "ckg/text.hpp"

namespace ckg {

struct TripletRecord {
    std::string source;      // visual-change description, e.g. "Motion: increased"
    std::string relation;    // brief causal reasoning; may be empty
    std::string target;      // music/audio-state description, e.g. "Genre: Pop"
    std::string provenance;  // optional video id + transition index; empty when absent
};

struct NodeRecord {
    int id = 0;
    std::string label;                    // canonical form (case-folded, whitespace-collapsed)
    std::vector<std::string> raw_labels;  // distinct surface forms merged into this node
};

struct EdgeRecord {
    int id = 0;
    int from = 0;
    int to = 0;
    std::string relation;
    long multiplicity = 1;  // identical (from, relation, to) ingestions
};

struct RejectedRecord {
    std::size_t line = 0;  // 1-based position in the input stream
    std::string reason;
};

struct IngestReport {
    long accepted = 0;           // records that created a new edge
    long merged_duplicates = 0;  // records folded into an existing edge
    long rejected = 0;
    std::vector<RejectedRecord> rejections;
};

class CausalGraph {
public:
    enum class AddResult { added, merged, empty_source, empty_target };

    AddResult add_triplet(const TripletRecord& rec) {
        const std::string source = canonicalize_label(rec.source);
        if (source.empty()) return AddResult::empty_source;
        const std::string target = canonicalize_label(rec.target);
        if (target.empty()) return AddResult::empty_target;

        const int from = ensure_node(source, rec.source);
        const int to = ensure_node(target, rec.target);
        const std::string relation = trim(rec.relation);

        auto key = std::make_tuple(from, relation, to);
        auto it = edge_index_.find(key);
        if (it != edge_index_.end()) {
            ++edges_[static_cast<std::size_t>(it->second)].multiplicity;
            return AddResult::merged;
        }
        const int edge_id = static_cast<int>(edges_.size());
        edges_.push_back(EdgeRecord{edge_id, from, to, relation, 1});
        edge_index_.emplace(std::move(key), edge_id);
        out_adjacency_[static_cast<std::size_t>(from)].push_back(edge_id);
        ++out_degree_[static_cast<std::size_t>(from)];
        ++in_degree_[static_cast<std::size_t>(to)];
        return AddResult::added;
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<NodeRecord>& nodes() const { return nodes_; }
    const std::vector<EdgeRecord>& edges() const { return edges_; }

    const NodeRecord& node(int id) const {
        check_node(id);
        return nodes_[static_cast<std::size_t>(id)];
    }

    const EdgeRecord& edge(int id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= edges_.size()) {
            throw std::out_of_range("edge id " + std::to_string(id) + " out of range");
        }
        return edges_[static_cast<std::size_t>(id)];
    }

    // Looks up a node by label; the query is canonicalized first.
    std::optional<int> find_node(std::string_view label) const {
        auto it = label_index_.find(canonicalize_label(label));
        if (it == label_index_.end()) return std::nullopt;
        return it->second;
    }

    // Edge ids leaving `id`, in insertion order.
    const std::vector<int>& out_edge_ids(int id) const {
        check_node(id);
        return out_adjacency_[static_cast<std::size_t>(id)];
    }

    std::vector<EdgeRecord> out_edges(int id) const {
        std::vector<EdgeRecord> result;
        for (int eid : out_edge_ids(id)) result.push_back(edges_[static_cast<std::size_t>(eid)]);
        return result;
    }

    int in_degree(int id) const {
        check_node(id);
        return in_degree_[static_cast<std::size_t>(id)];
    }

    int out_degree(int id) const {
        check_node(id);
        return out_degree_[static_cast<std::size_t>(id)];
    }

    // Rebuilds a graph from already-validated parts, preserving ids. Node and
    // edge ids must be dense; labels must be canonical and unique; endpoints
    // must resolve. Used by deserialization.
    static CausalGraph from_parts(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges) {
        CausalGraph g;
        std::sort(nodes.begin(), nodes.end(),
                  [](const NodeRecord& a, const NodeRecord& b) { return a.id < b.id; });
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].id != static_cast<int>(i)) {
                throw SchemaViolation("node ids must be dense in [0, N); missing or duplicate id " +
                                      std::to_string(i));
            }
            if (nodes[i].label != canonicalize_label(nodes[i].label)) {
                throw SchemaViolation("node label is not canonical: \"" + nodes[i].label + "\"");
            }
            if (nodes[i].label.empty()) {
                throw SchemaViolation("node " + std::to_string(i) + " has an empty label");
            }
            if (!g.label_index_.emplace(nodes[i].label, nodes[i].id).second) {
                throw SchemaViolation("duplicate node label: \"" + nodes[i].label + "\"");
            }
        }
        g.nodes_ = std::move(nodes);
        g.out_adjacency_.resize(g.nodes_.size());
        g.in_degree_.assign(g.nodes_.size(), 0);
        g.out_degree_.assign(g.nodes_.size(), 0);

        std::sort(edges.begin(), edges.end(),
                  [](const EdgeRecord& a, const EdgeRecord& b) { return a.id < b.id; });
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const EdgeRecord& e = edges[i];
            if (e.id != static_cast<int>(i)) {
                throw SchemaViolation("edge ids must be dense in [0, E); missing or duplicate id " +
                                      std::to_string(i));
            }
            auto in_range = [&](int nid) {
                return nid >= 0 && static_cast<std::size_t>(nid) < g.nodes_.size();
            };
            if (!in_range(e.from) || !in_range(e.to)) {
                throw SchemaViolation("edge " + std::to_string(e.id) +
                                      " references an unknown node id");
            }
            if (e.multiplicity < 1) {
                throw SchemaViolation("edge " + std::to_string(e.id) + " has multiplicity < 1");
            }
            if (!g.edge_index_.emplace(std::make_tuple(e.from, e.relation, e.to), e.id).second) {
                throw SchemaViolation("duplicate edge tuple at edge id " + std::to_string(e.id));
            }
            g.out_adjacency_[static_cast<std::size_t>(e.from)].push_back(e.id);
            ++g.out_degree_[static_cast<std::size_t>(e.from)];
            ++g.in_degree_[static_cast<std::size_t>(e.to)];
        }
        g.edges_ = std::move(edges);
        return g;
    }

private:
    void check_node(int id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
            throw UnknownNode("node id " + std::to_string(id) + " does not exist");
        }
    }

    int ensure_node(const std::string& canonical, const std::string& raw) {
        auto it = label_index_.find(canonical);
        int id;
        if (it == label_index_.end()) {
            id = static_cast<int>(nodes_.size());
            nodes_.push_back(NodeRecord{id, canonical, {}});
            label_index_.emplace(canonical, id);
            out_adjacency_.emplace_back();
            in_degree_.push_back(0);
            out_degree_.push_back(0);
        } else {
            id = it->second;
        }
        auto& raws = nodes_[static_cast<std::size_t>(id)].raw_labels;
        if (std::find(raws.begin(), raws.end(), raw) == raws.end()) raws.push_back(raw);
        return id;
    }

    std::vector<NodeRecord> nodes_;
    std::vector<EdgeRecord> edges_;
    std::vector<std::vector<int>> out_adjacency_;
    std::vector<int> in_degree_;
    std::vector<int> out_degree_;
    std::unordered_map<std::string, int> label_index_;
    std::map<std::tuple<int, std::string, int>, int> edge_index_;
};

// Builds a graph from a record stream. Malformed records are collected in the
// report, never fatal. When `source_lines` is given it must parallel
// `records` and supplies the 1-based line numbers used in rejection entries.
inline std::pair<CausalGraph, IngestReport> ingest_triplets(
    const std::vector<TripletRecord>& records,
    const std::vector<std::size_t>* source_lines = nullptr) {
    CausalGraph graph;
    IngestReport report;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::size_t line = source_lines ? (*source_lines)[i] : i + 1;
        switch (graph.add_triplet(records[i])) {
            case CausalGraph::AddResult::added:
                ++report.accepted;
                break;
            case CausalGraph::AddResult::merged:
                ++report.merged_duplicates;
                break;
            case CausalGraph::AddResult::empty_source:
                ++report.rejected;
                report.rejections.push_back({line, "empty source after canonicalization"});
                break;
            case CausalGraph::AddResult::empty_target:
                ++report.rejected;
                report.rejections.push_back({line, "empty target after canonicalization"});
                break;
        }
    }
    return {std::move(graph), std::move(report)};
}

}  // namespace ckg
