#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"

namespace forge {

struct LabeledSegment {
    std::string label; // display name after ontology resolution
    double start = 0.0;
    double end = 0.0;

    friend bool operator==(const LabeledSegment&, const LabeledSegment&) = default;
};

inline bool segment_order(const LabeledSegment& a, const LabeledSegment& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    return a.label < b.label;
}

enum class AnnotationSource { strong_tsv, fsd_csv };

inline std::string to_string(AnnotationSource s) {
    return s == AnnotationSource::strong_tsv ? "strong_tsv" : "fsd_csv";
}

inline AnnotationSource annotation_source_from_string(const std::string& s) {
    if (s == "strong_tsv") return AnnotationSource::strong_tsv;
    if (s == "fsd_csv") return AnnotationSource::fsd_csv;
    throw ParseError("unknown annotation source: " + s);
}

struct ClipAnnotation {
    std::string clip_id;
    AnnotationSource source = AnnotationSource::strong_tsv;
    std::vector<LabeledSegment> segments;

    friend bool operator==(const ClipAnnotation&, const ClipAnnotation&) = default;
};

class Ontology {
public:
    Ontology() = default;
    explicit Ontology(std::map<std::string, std::string> entries)
        : entries_(std::move(entries)) {}

    std::optional<std::string> name_of(const std::string& id) const {
        auto it = entries_.find(id);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    size_t size() const { return entries_.size(); }

private:
    std::map<std::string, std::string> entries_;
};

// AudioSet ontology file shape: a JSON array of {"id": ..., "name": ...}.
inline Ontology parse_ontology(const std::string& json_content) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_content);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("ontology is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("ontology JSON must be an array");
    std::map<std::string, std::string> entries;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("id") || !item.contains("name") ||
            !item["id"].is_string() || !item["name"].is_string()) {
            throw ParseError("ontology entry must be an object with string \"id\" and \"name\"");
        }
        std::string id = item["id"].get<std::string>();
        std::string name = item["name"].get<std::string>();
        if (name.empty()) throw ValidationError("ontology entry " + id + " has empty name");
        auto [it, inserted] = entries.emplace(std::move(id), std::move(name));
        if (!inserted) throw ValidationError("duplicate ontology id: " + it->first);
    }
    return Ontology(std::move(entries));
}

namespace detail {

inline std::vector<std::string> split_lines(std::string_view content) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= content.size()) {
        size_t nl = content.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < content.size()) lines.emplace_back(content.substr(start));
            break;
        }
        std::string_view line = content.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        start = nl + 1;
    }
    return lines;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            cols.push_back(line.substr(start));
            break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return cols;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* endp = nullptr;
    out = std::strtod(s.c_str(), &endp);
    return endp == s.c_str() + s.size();
}

// AudioSet-SL segment ids embed a start offset, e.g. "Y7fm...wav_30.000".
// Clip id is the part before the trailing "_<float>" suffix.
inline std::string clip_id_from_segment_id(const std::string& segment_id) {
    size_t us = segment_id.rfind('_');
    if (us == std::string::npos || us == 0 || us + 1 == segment_id.size())
        return segment_id;
    double ignored;
    if (parse_double(segment_id.substr(us + 1), ignored)) return segment_id.substr(0, us);
    return segment_id;
}

} // namespace detail

struct IngestResult {
    std::vector<ClipAnnotation> clips;
    std::vector<std::string> warnings;
};

// Strong-label TSV: segment_id \t start \t end \t label_id. An optional header
// row is detected by a non-numeric second column. In lenient mode malformed
// rows are skipped with a warning instead of aborting the parse.
inline IngestResult parse_strong_labels(const std::string& tsv_content, const Ontology& ontology,
                                        bool strict = true) {
    IngestResult result;
    std::map<std::string, std::vector<LabeledSegment>> by_clip;
    auto lines = detail::split_lines(tsv_content);
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        long line_no = static_cast<long>(i + 1);
        if (line.empty()) continue;

        auto bad_row = [&](const std::string& what) {
            if (strict) throw ParseError(what, line_no);
            result.warnings.push_back(what + " (line " + std::to_string(line_no) +
                                      "); row skipped");
        };

        auto cols = detail::split_tabs(line);
        if (cols.size() != 4) {
            bad_row("expected 4 tab-separated columns, got " + std::to_string(cols.size()));
            continue;
        }
        double start, end;
        if (!detail::parse_double(cols[1], start)) {
            if (i == 0) continue; // header row
            bad_row("non-numeric start time '" + cols[1] + "'");
            continue;
        }
        if (!detail::parse_double(cols[2], end)) {
            bad_row("non-numeric end time '" + cols[2] + "'");
            continue;
        }
        if (start < 0.0) {
            bad_row("negative start time");
            continue;
        }
        if (end <= start) {
            bad_row("segment end must exceed start");
            continue;
        }
        if (cols[3].empty()) {
            bad_row("empty label id");
            continue;
        }

        std::string label;
        if (auto name = ontology.name_of(cols[3])) {
            label = *name;
        } else {
            label = cols[3];
            result.warnings.push_back("unknown ontology id " + cols[3] + " at line " +
                                      std::to_string(line_no) + "; using raw id");
        }
        by_clip[detail::clip_id_from_segment_id(cols[0])].push_back(
            {std::move(label), start, end});
    }
    for (auto& [clip_id, segments] : by_clip) {
        std::sort(segments.begin(), segments.end(), segment_order);
        result.clips.push_back({clip_id, AnnotationSource::strong_tsv, std::move(segments)});
    }
    return result;
}

namespace detail {

// Minimal RFC-4180 row split: commas outside quotes delimit, "" escapes a quote.
inline std::vector<std::string> split_csv_row(const std::string& line, long line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field", line_no);
    fields.push_back(std::move(cur));
    return fields;
}

} // namespace detail

// FSD CSV: clip_id, "Label1,Label2,...". No timestamps; every label becomes a
// full-span segment over [0, clip_duration] so the clip can feed core-AQA
// tasks (never temporal generation).
inline IngestResult parse_fsd_csv(const std::string& csv_content, double clip_duration = 10.0) {
    IngestResult result;
    auto lines = detail::split_lines(csv_content);
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        long line_no = static_cast<long>(i + 1);
        if (line.empty()) continue;
        auto fields = detail::split_csv_row(line, line_no);
        if (fields.empty() || fields[0].empty()) throw ParseError("missing clip id", line_no);
        if (i == 0 && fields.size() >= 2 && fields[0] == "fname") continue; // FSD50k header
        ClipAnnotation clip{fields[0], AnnotationSource::fsd_csv, {}};
        if (fields.size() >= 2 && !fields[1].empty()) {
            std::stringstream labels(fields[1]);
            std::string label;
            while (std::getline(labels, label, ',')) {
                if (!label.empty()) clip.segments.push_back({label, 0.0, clip_duration});
            }
        }
        std::sort(clip.segments.begin(), clip.segments.end(), segment_order);
        result.clips.push_back(std::move(clip));
    }
    return result;
}

// Canonical internal clip JSON, one object per line.
inline nlohmann::json clip_to_json(const ClipAnnotation& clip) {
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& s : clip.segments)
        segments.push_back({{"label", s.label}, {"start", s.start}, {"end", s.end}});
    return {{"clip_id", clip.clip_id}, {"source", to_string(clip.source)},
            {"segments", segments}};
}

inline ClipAnnotation clip_from_json(const nlohmann::json& j) {
    ClipAnnotation clip;
    clip.clip_id = j.at("clip_id").get<std::string>();
    clip.source = annotation_source_from_string(j.at("source").get<std::string>());
    for (const auto& s : j.at("segments"))
        clip.segments.push_back({s.at("label").get<std::string>(), s.at("start").get<double>(),
                                 s.at("end").get<double>()});
    return clip;
}

inline std::string clips_to_jsonl(const std::vector<ClipAnnotation>& clips) {
    std::string out;
    for (const auto& clip : clips) {
        out += clip_to_json(clip).dump();
        out += '\n';
    }
    return out;
}

inline std::vector<ClipAnnotation> clips_from_jsonl(const std::string& content) {
    std::vector<ClipAnnotation> clips;
    auto lines = detail::split_lines(content);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        try {
            clips.push_back(clip_from_json(nlohmann::json::parse(lines[i])));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad clip JSON: ") + e.what(),
                             static_cast<long>(i + 1));
        }
    }
    return clips;
}

} // namespace forge
