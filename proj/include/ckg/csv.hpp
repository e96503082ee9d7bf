#pragma once

// RFC-4180 CSV reading and writing. Writer emits LF line endings and quotes
// only when required; reader accepts LF and CRLF and quoted fields containing
// commas, quotes, and newlines.

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ckg/errors.hpp"

namespace ckg {

inline std::string csv_escape(std::string_view field) {
    const bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void csv_write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.put(',');
        out << csv_escape(fields[i]);
    }
    out.put('\n');
}

// Parses a whole stream into rows of fields. Blank lines are skipped.
// Throws SchemaViolation on an unterminated quoted field or stray quote.
inline std::vector<std::vector<std::string>> csv_read(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool row_has_content = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_has_content = false;
    };

    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted) {
                    throw SchemaViolation("csv: quote inside unquoted field");
                }
                in_quotes = true;
                field_was_quoted = true;
                row_has_content = true;
                break;
            case ',':
                end_field();
                row_has_content = true;
                break;
            case '\r':
                break;  // handled by the following '\n'
            case '\n':
                if (row_has_content || !field.empty() || field_was_quoted) end_row();
                break;
            default:
                field.push_back(c);
                row_has_content = true;
                break;
        }
    }
    if (in_quotes) throw SchemaViolation("csv: unterminated quoted field");
    if (row_has_content || !field.empty()) end_row();
    return rows;
}

inline std::vector<std::vector<std::string>> csv_read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path.string());
    return csv_read(in);
}

}  // namespace ckg
