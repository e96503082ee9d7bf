#pragma once

// Small text helpers shared by label canonicalization, keyword extraction,
// and anchor matching. All case handling is ASCII-only; bytes outside the
// ASCII range pass through untouched and act as token boundaries.

#include <string>
#include <string_view>
#include <vector>

namespace ckg {

inline bool ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

inline bool ascii_alnum(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && ascii_space(s[b])) ++b;
    while (e > b && ascii_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_lower(c);
    return out;
}

// Trim, case-fold, and collapse internal whitespace runs to a single space.
// Idempotent; may return the empty string (callers decide whether to reject).
inline std::string canonicalize_label(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (ascii_space(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(ascii_lower(c));
    }
    return out;
}

// Lowercased maximal alphanumeric runs, in order of appearance.
inline std::vector<std::string> tokenize_lower_alnum(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (ascii_alnum(c)) {
            cur.push_back(ascii_lower(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

// True when `term` occurs in `text` with a non-alphanumeric character (or the
// string edge) on both sides. Both inputs are expected lowercase already.
inline bool contains_bounded(std::string_view text, std::string_view term) {
    if (term.empty() || term.size() > text.size()) return false;
    for (std::size_t pos = text.find(term); pos != std::string_view::npos;
         pos = text.find(term, pos + 1)) {
        const bool left_ok = pos == 0 || !ascii_alnum(text[pos - 1]);
        const std::size_t end = pos + term.size();
        const bool right_ok = end == text.size() || !ascii_alnum(text[end]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

}  // namespace ckg
