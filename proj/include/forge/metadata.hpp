#pragma once

#include <string>
#include <vector>

#include "forge/errors.hpp"
#include "forge/timeline.hpp"

namespace forge {

struct MetadataText {
    std::string clip_id;
    std::string text;
};

struct MetadataOptions {
    // The source grammar runs the background sentence straight into the next
    // one ("...Music.The audio starts..."). Set true to insert a space.
    bool space_after_background = false;
};

// Natural-language rendering of a timeline. Background clause first, then the
// foreground sequence with connectors alternating "followed by" / "then".
inline MetadataText render_metadata(const Timeline& t, const MetadataOptions& opt = {}) {
    if (t.foreground.empty() && t.background.empty())
        throw ValidationError("cannot render metadata for an empty timeline: " + t.clip_id);

    std::string text;
    if (!t.background.empty()) {
        text += "The background of the audio is ";
        bool first = true;
        for (const auto& label : t.background) {
            if (!first) text += " and ";
            text += label;
            first = false;
        }
        text += ".";
        if (opt.space_after_background && !t.foreground.empty()) text += " ";
    }
    if (!t.foreground.empty()) {
        text += "The audio starts with " + t.foreground[0].label;
        for (size_t i = 1; i < t.foreground.size(); ++i) {
            text += (i % 2 == 1) ? " followed by " : " then ";
            text += t.foreground[i].label;
        }
        text += ".";
    }
    return {t.clip_id, text};
}

struct ParsedMetadata {
    std::vector<std::string> background;
    std::vector<std::string> foreground;
};

// Inverse of render_metadata; used by the validator's round-trip check.
inline ParsedMetadata parse_metadata(const std::string& text) {
    static const std::string kBackground = "The background of the audio is ";
    static const std::string kStarts = "The audio starts with ";

    ParsedMetadata out;
    size_t pos = 0;
    if (text.rfind(kBackground, 0) == 0) {
        size_t start_clause = text.find(kStarts);
        size_t clause_end = start_clause == std::string::npos ? text.size() : start_clause;
        // background list ends at the period closing the clause
        size_t period = text.rfind('.', clause_end == 0 ? 0 : clause_end - 1);
        if (period == std::string::npos || period < kBackground.size())
            throw ParseError("malformed background clause: " + text);
        std::string list = text.substr(kBackground.size(), period - kBackground.size());
        size_t item_start = 0;
        while (true) {
            size_t sep = list.find(" and ", item_start);
            if (sep == std::string::npos) {
                out.background.push_back(list.substr(item_start));
                break;
            }
            out.background.push_back(list.substr(item_start, sep - item_start));
            item_start = sep + 5;
        }
        pos = start_clause == std::string::npos ? text.size() : start_clause;
    }
    if (pos < text.size()) {
        if (text.compare(pos, kStarts.size(), kStarts) != 0)
            throw ParseError("malformed foreground clause: " + text);
        if (text.back() != '.') throw ParseError("metadata must end with '.': " + text);
        std::string seq = text.substr(pos + kStarts.size(),
                                      text.size() - pos - kStarts.size() - 1);
        size_t item_start = 0;
        size_t transition = 1;
        while (true) {
            const std::string connector = (transition % 2 == 1) ? " followed by " : " then ";
            size_t sep = seq.find(connector, item_start);
            if (sep == std::string::npos) {
                out.foreground.push_back(seq.substr(item_start));
                break;
            }
            out.foreground.push_back(seq.substr(item_start, sep - item_start));
            item_start = sep + connector.size();
            ++transition;
        }
    }
    return out;
}

} // namespace forge
