#pragma once

// Topological statistics over an immutable causal graph: density, average
// degree, root-node census, initiator ranking, and community decomposition.
// Directed conventions throughout: density E/(N·(N−1)), average degree E/N.
// Communities are weakly connected components (edge direction ignored).

#include <algorithm>
#include <cstddef>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ckg/errors.hpp"
#include "ckg/graph.hpp"

namespace ckg {

struct GraphSummary {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    double density = 0.0;
    double average_degree = 0.0;
    std::size_t root_node_count = 0;
    double root_node_fraction = 0.0;
    std::size_t community_count = 0;
    std::size_t largest_community_size = 0;
    double largest_community_fraction = 0.0;
    std::vector<std::pair<std::string, std::size_t>> top_initiators;  // (label, out_degree)
};

inline double density(const CausalGraph& graph) {
    const std::size_t n = graph.node_count();
    if (n < 2) throw DegenerateGraph("density requires at least 2 nodes");
    return static_cast<double>(graph.edge_count()) /
           (static_cast<double>(n) * static_cast<double>(n - 1));
}

inline double average_degree(const CausalGraph& graph) {
    const std::size_t n = graph.node_count();
    if (n == 0) throw DegenerateGraph("average degree requires at least 1 node");
    return static_cast<double>(graph.edge_count()) / static_cast<double>(n);
}

// Nodes with zero in-degree. A self-loop contributes in-degree, so a node
// whose only in-edge is its own loop does not count.
inline std::pair<std::size_t, double> root_node_census(const CausalGraph& graph) {
    const std::size_t n = graph.node_count();
    if (n == 0) throw DegenerateGraph("root census requires at least 1 node");
    std::size_t count = 0;
    for (const NodeRecord& node : graph.nodes()) {
        if (graph.in_degree(node.id) == 0) ++count;
    }
    return {count, static_cast<double>(count) / static_cast<double>(n)};
}

// Nodes ranked by out-degree descending, ties broken by label ascending,
// truncated to n. n larger than the node count returns all nodes.
inline std::vector<std::pair<std::string, std::size_t>> top_initiators(const CausalGraph& graph,
                                                                       std::size_t n) {
    std::vector<std::pair<std::string, std::size_t>> ranked;
    ranked.reserve(graph.node_count());
    for (const NodeRecord& node : graph.nodes()) {
        ranked.emplace_back(node.label, static_cast<std::size_t>(graph.out_degree(node.id)));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > n) ranked.resize(n);
    return ranked;
}

// Weakly connected components. Members sorted ascending; components sorted by
// size descending, then by smallest member id.
inline std::vector<std::vector<int>> communities(const CausalGraph& graph) {
    const std::size_t n = graph.node_count();
    std::vector<std::vector<int>> undirected(n);
    for (const EdgeRecord& e : graph.edges()) {
        undirected[static_cast<std::size_t>(e.from)].push_back(e.to);
        if (e.from != e.to) undirected[static_cast<std::size_t>(e.to)].push_back(e.from);
    }

    std::vector<std::vector<int>> components;
    std::vector<bool> seen(n, false);
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::vector<int> members;
        std::queue<int> frontier;
        frontier.push(static_cast<int>(start));
        seen[start] = true;
        while (!frontier.empty()) {
            int v = frontier.front();
            frontier.pop();
            members.push_back(v);
            for (int w : undirected[static_cast<std::size_t>(v)]) {
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = true;
                    frontier.push(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        components.push_back(std::move(members));
    }
    std::sort(components.begin(), components.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  if (a.size() != b.size()) return a.size() > b.size();
                  return a.front() < b.front();
              });
    return components;
}

inline GraphSummary graph_summary(const CausalGraph& graph, std::size_t top_n) {
    if (graph.node_count() < 2) throw DegenerateGraph("summary requires at least 2 nodes");
    GraphSummary s;
    s.node_count = graph.node_count();
    s.edge_count = graph.edge_count();
    s.density = density(graph);
    s.average_degree = average_degree(graph);
    auto [roots, fraction] = root_node_census(graph);
    s.root_node_count = roots;
    s.root_node_fraction = fraction;
    const auto parts = communities(graph);
    s.community_count = parts.size();
    s.largest_community_size = parts.empty() ? 0 : parts.front().size();
    s.largest_community_fraction =
        static_cast<double>(s.largest_community_size) / static_cast<double>(s.node_count);
    s.top_initiators = top_initiators(graph, top_n);
    return s;
}

inline nlohmann::json summary_to_json(const GraphSummary& s) {
    nlohmann::json initiators = nlohmann::json::array();
    for (const auto& [label, out_degree] : s.top_initiators) {
        initiators.push_back({{"label", label}, {"out_degree", out_degree}});
    }
    return nlohmann::json{{"node_count", s.node_count},
                          {"edge_count", s.edge_count},
                          {"density", s.density},
                          {"average_degree", s.average_degree},
                          {"root_node_count", s.root_node_count},
                          {"root_node_fraction", s.root_node_fraction},
                          {"community_count", s.community_count},
                          {"largest_community_size", s.largest_community_size},
                          {"largest_community_fraction", s.largest_community_fraction},
                          {"top_initiators", std::move(initiators)}};
}

}  // namespace ckg
