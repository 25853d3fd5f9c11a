#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/annotation.hpp"
#include "forge/errors.hpp"
#include "forge/text.hpp"

namespace forge {

struct Event {
    std::string label;
    double start = 0.0;
    double end = 0.0;
    int index = 0; // 0-based chronological position

    friend bool operator==(const Event&, const Event&) = default;
};

struct TimelineOptions {
    double clip_duration = 10.0;
    double merge_gap = 0.1;
    // Events with merged duration strictly greater than this are background.
    double background_threshold = 9.0;
    int max_foreground_types = 6;
    int max_foreground_occurrences = 9;
    // When true, the type/occurrence filter is evaluated on raw segments
    // before same-label merging instead of after.
    bool filter_before_merge = false;
};

struct Timeline {
    std::string clip_id;
    double clip_duration = 10.0;
    std::vector<Event> foreground; // chronological, (start, end, label) order
    std::set<std::string> background;
    bool eligible = false;
    std::string rejection_reason; // empty when eligible
};

enum class Tristate { yes, no, undetermined };

namespace detail {

struct TypeCountStats {
    size_t distinct_labels = 0;
    size_t occurrences = 0;
};

inline TypeCountStats type_count(const std::vector<LabeledSegment>& segments) {
    std::set<std::string> labels;
    for (const auto& s : segments) labels.insert(s.label);
    return {labels.size(), segments.size()};
}

} // namespace detail

inline Timeline build_timeline(const ClipAnnotation& clip, const TimelineOptions& opt = {}) {
    Timeline t;
    t.clip_id = clip.clip_id;
    t.clip_duration = opt.clip_duration;

    // Truncate to the clip window, drop what vanishes.
    std::vector<LabeledSegment> segments;
    for (const auto& s : clip.segments) {
        double start = std::max(s.start, 0.0);
        double end = std::min(s.end, opt.clip_duration);
        if (end > start) segments.push_back({s.label, start, end});
    }

    auto pre_merge_stats = detail::type_count(segments);

    // Merge same-label segments whose gap is within merge_gap.
    std::map<std::string, std::vector<LabeledSegment>> by_label;
    for (auto& s : segments) by_label[s.label].push_back(std::move(s));
    std::vector<LabeledSegment> merged;
    for (auto& [label, group] : by_label) {
        std::sort(group.begin(), group.end(), segment_order);
        for (const auto& s : group) {
            if (!merged.empty() && merged.back().label == label &&
                s.start - merged.back().end <= opt.merge_gap) {
                merged.back().end = std::max(merged.back().end, s.end);
            } else {
                merged.push_back(s);
            }
        }
    }

    // Long merged segments are background beds; a label with any background
    // segment never also appears as foreground.
    for (const auto& s : merged)
        if (s.end - s.start > opt.background_threshold) t.background.insert(s.label);
    std::vector<LabeledSegment> foreground;
    for (auto& s : merged)
        if (!t.background.contains(s.label)) foreground.push_back(std::move(s));
    std::sort(foreground.begin(), foreground.end(), segment_order);

    for (size_t i = 0; i < foreground.size(); ++i)
        t.foreground.push_back({foreground[i].label, foreground[i].start, foreground[i].end,
                                static_cast<int>(i)});

    auto stats = opt.filter_before_merge ? pre_merge_stats : detail::type_count(foreground);
    if (t.foreground.empty()) {
        t.eligible = false;
        t.rejection_reason = "no_foreground_events";
    } else if (stats.distinct_labels > static_cast<size_t>(opt.max_foreground_types)) {
        t.eligible = false;
        t.rejection_reason = "too_many_event_types";
    } else if (stats.occurrences > static_cast<size_t>(opt.max_foreground_occurrences)) {
        t.eligible = false;
        t.rejection_reason = "too_many_event_occurrences";
    } else {
        t.eligible = true;
    }
    return t;
}

inline int count_occurrences(const Timeline& t, const std::string& label) {
    std::string needle = text::normalize(label);
    int count = 0;
    for (const auto& e : t.foreground)
        if (text::normalize(e.label) == needle) ++count;
    return count;
}

// Labels of all foreground events strictly after the k-th occurrence of
// `label` (k = occurrence, 1-based). Throws when fewer than k occurrences.
inline std::vector<std::string> events_after(const Timeline& t, const std::string& label,
                                             int occurrence) {
    if (occurrence < 1) throw ValidationError("occurrence must be >= 1");
    std::string needle = text::normalize(label);
    int seen = 0;
    for (const auto& e : t.foreground) {
        if (text::normalize(e.label) == needle && ++seen == occurrence) {
            std::vector<std::string> out;
            for (size_t i = static_cast<size_t>(e.index) + 1; i < t.foreground.size(); ++i)
                out.push_back(t.foreground[i].label);
            return out;
        }
    }
    throw ValidationError("occurrence_not_found: '" + label + "' occurs " +
                          std::to_string(seen) + " time(s), requested occurrence " +
                          std::to_string(occurrence));
}

// First occurrence of a strictly before first occurrence of b. Undetermined
// when either label is absent or the first starts coincide.
inline Tristate precedes(const Timeline& t, const std::string& a, const std::string& b) {
    std::string na = text::normalize(a), nb = text::normalize(b);
    const Event* first_a = nullptr;
    const Event* first_b = nullptr;
    for (const auto& e : t.foreground) {
        std::string label = text::normalize(e.label);
        if (!first_a && label == na) first_a = &e;
        if (!first_b && label == nb) first_b = &e;
    }
    if (!first_a || !first_b) return Tristate::undetermined;
    if (first_a->start == first_b->start) return Tristate::undetermined;
    return first_a->start < first_b->start ? Tristate::yes : Tristate::no;
}

// Pairs (x, y) where every occurrence of x that has a successor is immediately
// followed by y, and x occurs at least twice.
inline std::vector<std::pair<std::string, std::string>> recurrence_pattern(const Timeline& t) {
    std::map<std::string, int> occurrences;
    for (const auto& e : t.foreground) ++occurrences[e.label];

    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [label, count] : occurrences) {
        if (count < 2) continue;
        std::string successor;
        bool consistent = true, any = false;
        for (size_t i = 0; i + 1 < t.foreground.size(); ++i) {
            if (t.foreground[i].label != label) continue;
            const std::string& next = t.foreground[i + 1].label;
            if (!any) {
                successor = next;
                any = true;
            } else if (next != successor) {
                consistent = false;
                break;
            }
        }
        if (any && consistent) pairs.emplace_back(label, successor);
    }
    return pairs;
}

inline nlohmann::json timeline_to_json(const Timeline& t) {
    nlohmann::json fg = nlohmann::json::array();
    for (const auto& e : t.foreground)
        fg.push_back({{"label", e.label}, {"start", e.start}, {"end", e.end},
                      {"index", e.index}});
    nlohmann::json j{{"clip_id", t.clip_id},
                     {"clip_duration", t.clip_duration},
                     {"foreground", fg},
                     {"background", t.background},
                     {"eligible", t.eligible}};
    if (!t.eligible) j["rejection_reason"] = t.rejection_reason;
    return j;
}

} // namespace forge
