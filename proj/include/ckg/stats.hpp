#pragma once

// Spearman rank correlation over a merged per-scene feature table, with
// tie-averaged ranks, pairwise missing-data deletion, and CSV export of the
// visual-by-audio correlation matrix.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ckg/csv.hpp"
#include "ckg/errors.hpp"
#include "ckg/text.hpp"

namespace ckg {

// Ranks 1..n; tied values share the average of their rank positions.
inline std::vector<double> rank_with_ties(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFinite("cannot rank non-finite value");
    }
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// Pearson correlation of the tie-averaged ranks, clamped to [-1, 1].
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw DimensionMismatch("spearman requires equal-length inputs, got " +
                                std::to_string(x.size()) + " and " + std::to_string(y.size()));
    }
    if (x.size() < 2) throw InsufficientData("spearman requires at least 2 pairs");
    const std::vector<double> rx = rank_with_ties(x);
    const std::vector<double> ry = rank_with_ties(y);
    const double n = static_cast<double>(rx.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateColumn("spearman undefined for a constant rank vector");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace detail {

inline bool is_missing_marker(std::string marker) {
    marker = to_lower(trim(marker));
    return marker.empty() || marker == "na" || marker == "nan" || marker == "null";
}

}  // namespace detail

// Column-oriented numeric table keyed by scene_id; cells may be missing.
class FeatureTable {
  public:
    static FeatureTable from_csv(std::istream& in) {
        const std::vector<std::vector<std::string>> rows = csv_read(in);
        if (rows.empty()) throw SchemaViolation("feature table has no header row");
        const std::vector<std::string>& header = rows.front();

        FeatureTable table;
        std::optional<std::size_t> id_col;
        for (std::size_t c = 0; c < header.size(); ++c) {
            const std::string name = trim(header[c]);
            if (name.empty()) throw SchemaViolation("feature table has an empty column name");
            if (table.column_index_.count(name)) {
                throw SchemaViolation("duplicate column \"" + name + "\" in feature table");
            }
            if (name == "scene_id") {
                id_col = c;
                table.column_index_.emplace(name, std::size_t(-1));
            } else {
                table.column_index_.emplace(name, table.column_names_.size());
                table.column_names_.push_back(name);
            }
        }
        if (!id_col) throw SchemaViolation("feature table is missing the scene_id column");
        table.columns_.resize(table.column_names_.size());

        for (std::size_t r = 1; r < rows.size(); ++r) {
            const std::vector<std::string>& row = rows[r];
            if (row.size() != header.size()) {
                throw SchemaViolation("row " + std::to_string(r + 1) + " has " +
                                      std::to_string(row.size()) + " fields, expected " +
                                      std::to_string(header.size()));
            }
            std::size_t data_col = 0;
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c == *id_col) {
                    table.scene_ids_.push_back(row[c]);
                    continue;
                }
                std::optional<double> cell;
                if (!detail::is_missing_marker(row[c])) {
                    try {
                        std::size_t consumed = 0;
                        const std::string text = trim(row[c]);
                        const double value = std::stod(text, &consumed);
                        if (consumed != text.size() || !std::isfinite(value)) throw std::invalid_argument(text);
                        cell = value;
                    } catch (const std::exception&) {
                        throw SchemaViolation("row " + std::to_string(r + 1) + ", column \"" +
                                              header[c] + "\": non-numeric cell \"" + row[c] + "\"");
                    }
                }
                table.columns_[data_col++].push_back(cell);
            }
        }
        return table;
    }

    static FeatureTable from_csv_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoFailure("cannot open feature table " + path);
        return from_csv(in);
    }

    std::size_t row_count() const { return scene_ids_.size(); }
    const std::vector<std::string>& scene_ids() const { return scene_ids_; }
    const std::vector<std::string>& column_names() const { return column_names_; }

    bool has_column(const std::string& name) const {
        const auto it = column_index_.find(name);
        return it != column_index_.end() && it->second != std::size_t(-1);
    }

    const std::vector<std::optional<double>>& column(const std::string& name) const {
        const auto it = column_index_.find(name);
        if (it == column_index_.end() || it->second == std::size_t(-1)) {
            throw UnknownColumn("no numeric column named \"" + name + "\"");
        }
        return columns_[it->second];
    }

  private:
    std::vector<std::string> scene_ids_;
    std::vector<std::string> column_names_;
    std::vector<std::vector<std::optional<double>>> columns_;
    std::map<std::string, std::size_t> column_index_;
};

enum class CellStatus { ok, insufficient_data, degenerate };

struct CorrelationCell {
    double value = 0.0;  // meaningful only when status == ok
    CellStatus status = CellStatus::ok;
    std::size_t pair_count = 0;
};

struct CorrelationMatrix {
    std::vector<std::string> row_labels;  // visual features
    std::vector<std::string> col_labels;  // audio features
    std::vector<std::vector<CorrelationCell>> cells;
};

// Spearman per (visual, audio) pair with pairwise deletion of rows where
// either cell is missing; undefined cells are flagged, never fabricated.
inline CorrelationMatrix correlation_matrix(const FeatureTable& table,
                                            const std::vector<std::string>& visual_cols,
                                            const std::vector<std::string>& audio_cols) {
    CorrelationMatrix matrix;
    matrix.row_labels = visual_cols;
    matrix.col_labels = audio_cols;
    matrix.cells.resize(visual_cols.size());

    for (std::size_t i = 0; i < visual_cols.size(); ++i) {
        const auto& vcol = table.column(visual_cols[i]);
        matrix.cells[i].resize(audio_cols.size());
        for (std::size_t j = 0; j < audio_cols.size(); ++j) {
            const auto& acol = table.column(audio_cols[j]);
            std::vector<double> x, y;
            for (std::size_t r = 0; r < table.row_count(); ++r) {
                if (vcol[r] && acol[r]) {
                    x.push_back(*vcol[r]);
                    y.push_back(*acol[r]);
                }
            }
            CorrelationCell& cell = matrix.cells[i][j];
            cell.pair_count = x.size();
            try {
                cell.value = spearman(x, y);
                cell.status = CellStatus::ok;
            } catch (const InsufficientData&) {
                cell.status = CellStatus::insufficient_data;
            } catch (const DegenerateColumn&) {
                cell.status = CellStatus::degenerate;
            }
        }
    }
    return matrix;
}

// Matrix CSV: one header row of audio labels, one row per visual feature.
// Undefined cells export as the literal NA.
inline void write_matrix_csv(std::ostream& out, const CorrelationMatrix& matrix) {
    std::vector<std::string> header{"feature"};
    header.insert(header.end(), matrix.col_labels.begin(), matrix.col_labels.end());
    csv_write_row(out, header);
    char buf[32];
    for (std::size_t i = 0; i < matrix.row_labels.size(); ++i) {
        std::vector<std::string> row{matrix.row_labels[i]};
        for (const CorrelationCell& cell : matrix.cells[i]) {
            if (cell.status == CellStatus::ok) {
                std::snprintf(buf, sizeof buf, "%.6f", cell.value);
                row.emplace_back(buf);
            } else {
                row.emplace_back("NA");
            }
        }
        csv_write_row(out, row);
    }
}

inline void write_pair_counts_csv(std::ostream& out, const CorrelationMatrix& matrix) {
    std::vector<std::string> header{"feature"};
    header.insert(header.end(), matrix.col_labels.begin(), matrix.col_labels.end());
    csv_write_row(out, header);
    for (std::size_t i = 0; i < matrix.row_labels.size(); ++i) {
        std::vector<std::string> row{matrix.row_labels[i]};
        for (const CorrelationCell& cell : matrix.cells[i]) {
            row.push_back(std::to_string(cell.pair_count));
        }
        csv_write_row(out, row);
    }
}

inline void write_matrix_csv(const std::string& path, const CorrelationMatrix& matrix) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    write_matrix_csv(out, matrix);
}

inline void write_pair_counts_csv(const std::string& path, const CorrelationMatrix& matrix) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    write_pair_counts_csv(out, matrix);
}

}  // namespace ckg
