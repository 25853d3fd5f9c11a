#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace forge::text {

inline std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

inline bool is_punct_token_char(char c) {
    static constexpr std::string_view kPunct = ".,!?;:\"'()[]-";
    return kPunct.find(c) != std::string_view::npos;
}

// Lowercase, punctuation to spaces, split on whitespace runs.
inline std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : s) {
        char lc = static_cast<char>(std::tolower(c));
        if (std::isspace(c) || is_punct_token_char(lc)) {
            if (!cur.empty()) {
                tokens.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(lc);
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// Canonical form used for label matching and dedupe: lowercase, punctuation
// stripped, whitespace collapsed to single spaces.
inline std::string normalize(std::string_view s) {
    return join(tokenize(s), " ");
}

// Whole-phrase containment of `phrase` in `text`, both already normalized.
// Matches only at token boundaries so "cat" never matches inside "catfish".
inline bool contains_phrase(const std::string& text, const std::string& phrase) {
    if (phrase.empty()) return false;
    size_t pos = 0;
    while ((pos = text.find(phrase, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || text[pos - 1] == ' ';
        size_t end = pos + phrase.size();
        bool right_ok = end == text.size() || text[end] == ' ';
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

// Position of the first whole-phrase match, or npos.
inline size_t find_phrase(const std::string& text, const std::string& phrase) {
    if (phrase.empty()) return std::string::npos;
    size_t pos = 0;
    while ((pos = text.find(phrase, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || text[pos - 1] == ' ';
        size_t end = pos + phrase.size();
        bool right_ok = end == text.size() || text[end] == ' ';
        if (left_ok && right_ok) return pos;
        ++pos;
    }
    return std::string::npos;
}

} // namespace forge::text
