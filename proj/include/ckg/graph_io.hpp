#pragma once

// Graph interchange: entity/relationship CSV tables and JSON-lines triplet
// input. The CSV pair is the bit-exact on-disk form; serialize followed by
// load reproduces the graph with identical ids.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ckg/csv.hpp"
#include "ckg/errors.hpp"
#include "ckg/graph.hpp"

namespace ckg {

inline constexpr const char* kEntityHeader = "id,label";
inline constexpr const char* kRelationshipHeader = "id,from_id,to_id,relation,multiplicity";

namespace detail {

inline long parse_long(const std::string& s, const char* what) {
    long value = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw SchemaViolation(std::string(what) + ": not an integer: \"" + s + "\"");
    }
    return value;
}

inline void require_header(const std::vector<std::string>& row, const char* expected,
                           const char* table) {
    std::string joined;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) joined.push_back(',');
        joined += row[i];
    }
    if (joined != expected) {
        throw SchemaViolation(std::string(table) + " table: expected header \"" + expected +
                              "\", got \"" + joined + "\"");
    }
}

}  // namespace detail

inline void serialize_graph(const CausalGraph& graph, std::ostream& entity_out,
                            std::ostream& relationship_out) {
    csv_write_row(entity_out, {"id", "label"});
    for (const NodeRecord& n : graph.nodes()) {
        csv_write_row(entity_out, {std::to_string(n.id), n.label});
    }
    csv_write_row(relationship_out, {"id", "from_id", "to_id", "relation", "multiplicity"});
    for (const EdgeRecord& e : graph.edges()) {
        csv_write_row(relationship_out,
                      {std::to_string(e.id), std::to_string(e.from), std::to_string(e.to),
                       e.relation, std::to_string(e.multiplicity)});
    }
}

inline void serialize_graph(const CausalGraph& graph, const std::filesystem::path& entity_csv,
                            const std::filesystem::path& relationship_csv) {
    std::ofstream entity_out(entity_csv, std::ios::binary);
    if (!entity_out) throw IoFailure("cannot write " + entity_csv.string());
    std::ofstream relationship_out(relationship_csv, std::ios::binary);
    if (!relationship_out) throw IoFailure("cannot write " + relationship_csv.string());
    serialize_graph(graph, entity_out, relationship_out);
    if (!entity_out.flush() || !relationship_out.flush()) {
        throw IoFailure("short write while serializing graph tables");
    }
}

inline CausalGraph load_graph(std::istream& entity_in, std::istream& relationship_in) {
    const auto entity_rows = csv_read(entity_in);
    if (entity_rows.empty()) throw SchemaViolation("entity table: missing header row");
    detail::require_header(entity_rows[0], kEntityHeader, "entity");

    std::vector<NodeRecord> nodes;
    for (std::size_t i = 1; i < entity_rows.size(); ++i) {
        const auto& row = entity_rows[i];
        if (row.size() != 2) {
            throw SchemaViolation("entity table row " + std::to_string(i + 1) +
                                  ": expected 2 fields, got " + std::to_string(row.size()));
        }
        NodeRecord n;
        n.id = static_cast<int>(detail::parse_long(row[0], "entity id"));
        n.label = row[1];
        nodes.push_back(std::move(n));
    }

    const auto rel_rows = csv_read(relationship_in);
    if (rel_rows.empty()) throw SchemaViolation("relationship table: missing header row");
    detail::require_header(rel_rows[0], kRelationshipHeader, "relationship");

    std::vector<EdgeRecord> edges;
    for (std::size_t i = 1; i < rel_rows.size(); ++i) {
        const auto& row = rel_rows[i];
        if (row.size() != 5) {
            throw SchemaViolation("relationship table row " + std::to_string(i + 1) +
                                  ": expected 5 fields, got " + std::to_string(row.size()));
        }
        EdgeRecord e;
        e.id = static_cast<int>(detail::parse_long(row[0], "relationship id"));
        e.from = static_cast<int>(detail::parse_long(row[1], "relationship from_id"));
        e.to = static_cast<int>(detail::parse_long(row[2], "relationship to_id"));
        e.relation = row[3];
        e.multiplicity = detail::parse_long(row[4], "relationship multiplicity");
        edges.push_back(std::move(e));
    }
    return CausalGraph::from_parts(std::move(nodes), std::move(edges));
}

inline CausalGraph load_graph(const std::filesystem::path& entity_csv,
                              const std::filesystem::path& relationship_csv) {
    std::ifstream entity_in(entity_csv, std::ios::binary);
    if (!entity_in) throw IoFailure("cannot open " + entity_csv.string());
    std::ifstream relationship_in(relationship_csv, std::ios::binary);
    if (!relationship_in) throw IoFailure("cannot open " + relationship_csv.string());
    return load_graph(entity_in, relationship_in);
}

struct TripletReadResult {
    std::vector<TripletRecord> records;
    std::vector<std::size_t> lines;  // 1-based input line per record
    std::vector<RejectedRecord> rejected;
};

// One JSON object per line: {"source": ..., "relation": ..., "target": ...,
// "provenance": ...}. relation and provenance are optional. Malformed lines
// are collected, not fatal; blank lines are skipped.
inline TripletReadResult read_triplets_jsonl(std::istream& in) {
    TripletReadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            result.rejected.push_back({line_no, "not a valid JSON object"});
            continue;
        }
        auto string_field = [&](const char* key, bool required,
                                std::string& out) -> const char* {
            auto it = obj.find(key);
            if (it == obj.end()) return required ? "missing" : nullptr;
            if (!it->is_string()) return "non-string";
            out = it->get<std::string>();
            return nullptr;
        };
        TripletRecord rec;
        if (const char* err = string_field("source", true, rec.source)) {
            result.rejected.push_back({line_no, std::string(err) + " \"source\" field"});
            continue;
        }
        if (const char* err = string_field("target", true, rec.target)) {
            result.rejected.push_back({line_no, std::string(err) + " \"target\" field"});
            continue;
        }
        if (const char* err = string_field("relation", false, rec.relation)) {
            result.rejected.push_back({line_no, std::string(err) + " \"relation\" field"});
            continue;
        }
        if (const char* err = string_field("provenance", false, rec.provenance)) {
            result.rejected.push_back({line_no, std::string(err) + " \"provenance\" field"});
            continue;
        }
        result.records.push_back(std::move(rec));
        result.lines.push_back(line_no);
    }
    return result;
}

// Reads a JSONL triplet file and ingests it. Parse-level and ingest-level
// rejections are merged into one report ordered by input line.
inline std::pair<CausalGraph, IngestReport> build_graph_from_jsonl(
    const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path.string());
    TripletReadResult read = read_triplets_jsonl(in);
    auto [graph, report] = ingest_triplets(read.records, &read.lines);
    for (RejectedRecord& r : read.rejected) {
        ++report.rejected;
        report.rejections.push_back(std::move(r));
    }
    std::sort(report.rejections.begin(), report.rejections.end(),
              [](const RejectedRecord& a, const RejectedRecord& b) { return a.line < b.line; });
    return {std::move(graph), std::move(report)};
}

inline nlohmann::json ingest_report_to_json(const IngestReport& report) {
    nlohmann::json rejections = nlohmann::json::array();
    for (const RejectedRecord& r : report.rejections) {
        rejections.push_back({{"line", r.line}, {"reason", r.reason}});
    }
    return nlohmann::json{{"accepted", report.accepted},
                          {"merged_duplicates", report.merged_duplicates},
                          {"rejected", report.rejected},
                          {"rejections", std::move(rejections)}};
}

}  // namespace ckg
