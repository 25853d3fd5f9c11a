#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/genclient.hpp"
#include "forge/text.hpp"
#include "forge/timeline.hpp"

namespace forge {

enum class Category { chronological, counting, before_after, duration_background, pattern, other };

inline std::string to_string(Category c) {
    switch (c) {
        case Category::chronological: return "chronological";
        case Category::counting: return "counting";
        case Category::before_after: return "before_after";
        case Category::duration_background: return "duration_background";
        case Category::pattern: return "pattern";
        case Category::other: return "other";
    }
    return "other";
}

inline Category category_from_string(const std::string& s) {
    if (s == "chronological") return Category::chronological;
    if (s == "counting") return Category::counting;
    if (s == "before_after") return Category::before_after;
    if (s == "duration_background") return Category::duration_background;
    if (s == "pattern") return Category::pattern;
    return Category::other;
}

enum class Verdict { accepted, rejected, unverifiable };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::accepted: return "accepted";
        case Verdict::rejected: return "rejected";
        case Verdict::unverifiable: return "unverifiable";
    }
    return "unverifiable";
}

struct QARecord {
    std::string record_id;
    std::string clip_id;
    std::string question;
    std::string answer;
    std::string metadata;
    Category category = Category::other;
    Verdict verdict = Verdict::unverifiable;
    std::string reason; // set when rejected

    std::string split; // "train"/"test" once assigned
};

struct ValidatorConfig {
    bool keep_unverifiable = true;
    bool allow_other_category = false;
};

// Rule cascade; first matching rule in this priority order wins.
inline Category classify_category(const std::string& question) {
    std::string q = text::normalize(question);
    auto has = [&](const char* cue) { return q.find(cue) != std::string::npos; };
    if (has("how many") || has("number of times")) return Category::counting;
    if (has("sequence") || has("chronological") || has("order of")) return Category::chronological;
    if (text::contains_phrase(q, "before") || text::contains_phrase(q, "after") ||
        text::contains_phrase(q, "follows"))
        return Category::before_after;
    if (has("throughout") || has("background") || has("persists"))
        return Category::duration_background;
    if (has("recurs") || has("pattern") || has("each instance")) return Category::pattern;
    return Category::other;
}

namespace detail {

// Spelled-out numbers up to twenty; counting answers above that stay
// unverifiable (the eligibility filter caps occurrences at 9 anyway).
inline std::optional<int> number_word(const std::string& token) {
    static const std::map<std::string, int> words{
        {"one", 1},    {"two", 2},    {"three", 3},    {"four", 4},     {"five", 5},
        {"six", 6},    {"seven", 7},  {"eight", 8},    {"nine", 9},     {"ten", 10},
        {"eleven", 11}, {"twelve", 12}, {"thirteen", 13}, {"fourteen", 14},
        {"fifteen", 15}, {"sixteen", 16}, {"seventeen", 17}, {"eighteen", 18},
        {"nineteen", 19}, {"twenty", 20}, {"once", 1}, {"twice", 2}};
    auto it = words.find(token);
    if (it == words.end()) return std::nullopt;
    return it->second;
}

inline std::optional<int> first_count_in(const std::string& answer) {
    for (const auto& token : text::tokenize(answer)) {
        if (auto n = number_word(token)) return n;
        bool digits = !token.empty() &&
                      std::all_of(token.begin(), token.end(),
                                  [](unsigned char c) { return std::isdigit(c); });
        if (digits && token.size() <= 2) return std::stoi(token);
    }
    return std::nullopt;
}

struct LabelMention {
    std::string label; // original timeline label
    size_t position;   // first whole-phrase position in the normalized text
};

// Distinct timeline labels mentioned in `s`, ordered by first mention.
inline std::vector<LabelMention> label_mentions(const std::string& s,
                                                const std::vector<std::string>& labels) {
    std::string norm = text::normalize(s);
    std::vector<LabelMention> mentions;
    std::set<std::string> seen;
    for (const auto& label : labels) {
        if (seen.contains(label)) continue;
        seen.insert(label);
        size_t pos = text::find_phrase(norm, text::normalize(label));
        if (pos != std::string::npos) mentions.push_back({label, pos});
    }
    std::sort(mentions.begin(), mentions.end(),
              [](const LabelMention& a, const LabelMention& b) { return a.position < b.position; });
    return mentions;
}

inline std::vector<std::string> foreground_labels(const Timeline& t) {
    std::vector<std::string> labels;
    for (const auto& e : t.foreground) labels.push_back(e.label);
    return labels;
}

inline std::vector<std::string> all_labels(const Timeline& t) {
    std::vector<std::string> labels = foreground_labels(t);
    labels.insert(labels.end(), t.background.begin(), t.background.end());
    return labels;
}

// Is `mentioned` (distinct labels in first-mention order) consistent with some
// increasing walk through the oracle event sequence?
inline bool subsequence_consistent(const std::vector<std::string>& mentioned,
                                   const std::vector<std::string>& oracle) {
    size_t oi = 0;
    for (const auto& label : mentioned) {
        while (oi < oracle.size() && oracle[oi] != label) ++oi;
        if (oi == oracle.size()) return false;
        ++oi;
    }
    return true;
}

inline bool answer_polarity_positive(const std::string& answer, bool& determinate) {
    auto tokens = text::tokenize(answer);
    determinate = false;
    if (tokens.empty()) return false;
    const std::string& t0 = tokens[0];
    if (t0 == "yes" || t0 == "true") {
        determinate = true;
        return true;
    }
    if (t0 == "no" || t0 == "false") {
        determinate = true;
        return false;
    }
    return false;
}

} // namespace detail

// Conservative category-specific checks against the timeline oracle. Only
// provable contradictions reject; everything else the checks cannot pin down
// is unverifiable, because answers carry free-form rationale.
inline QARecord validate_qa(QARecord draft, const Timeline& t,
                            const ValidatorConfig& cfg = {}) {
    if (draft.clip_id != t.clip_id)
        throw ValidationError("clip mismatch: record " + draft.record_id + " carries clip " +
                              draft.clip_id + " but timeline is " + t.clip_id);
    if (draft.question.empty() || draft.answer.empty()) {
        draft.verdict = Verdict::rejected;
        draft.reason = "empty_field";
        return draft;
    }
    draft.category = classify_category(draft.question);
    if (draft.category == Category::other && !cfg.allow_other_category) {
        // No oracle covers an uncategorized question; not a provable
        // contradiction, so it stays unverifiable rather than rejected.
        draft.verdict = Verdict::unverifiable;
        return draft;
    }

    auto fg_labels = detail::foreground_labels(t);
    draft.verdict = Verdict::unverifiable;

    switch (draft.category) {
        case Category::counting: {
            auto questioned = detail::label_mentions(draft.question, fg_labels);
            auto count = detail::first_count_in(draft.answer);
            if (questioned.size() == 1 && count) {
                int oracle = count_occurrences(t, questioned[0].label);
                if (*count != oracle) {
                    draft.verdict = Verdict::rejected;
                    draft.reason = "count_mismatch: expected " + std::to_string(oracle) +
                                   ", answer says " + std::to_string(*count);
                } else {
                    draft.verdict = Verdict::accepted;
                }
            }
            break;
        }
        case Category::chronological: {
            auto mentioned = detail::label_mentions(draft.answer, fg_labels);
            if (mentioned.size() >= 2) {
                std::vector<std::string> order;
                for (const auto& m : mentioned) order.push_back(m.label);
                if (!detail::subsequence_consistent(order, fg_labels)) {
                    draft.verdict = Verdict::rejected;
                    draft.reason = "order_mismatch";
                } else {
                    draft.verdict = Verdict::accepted;
                }
            }
            break;
        }
        case Category::before_after: {
            auto in_question = detail::label_mentions(draft.question, fg_labels);
            bool determinate = false;
            bool positive = detail::answer_polarity_positive(draft.answer, determinate);
            std::string q = text::normalize(draft.question);
            bool asks_after = q.find("after") != std::string::npos;
            bool asks_before = q.find("before") != std::string::npos;
            if (in_question.size() == 2 && determinate && asks_after != asks_before) {
                // "Is A after B?" claims precedes(B, A); "Is A before B?"
                // claims precedes(A, B). Negative answers claim the opposite.
                const std::string& a = in_question[0].label;
                const std::string& b = in_question[1].label;
                Tristate oracle = asks_after ? precedes(t, b, a) : precedes(t, a, b);
                if (oracle != Tristate::undetermined) {
                    bool oracle_yes = oracle == Tristate::yes;
                    if (oracle_yes != positive) {
                        draft.verdict = Verdict::rejected;
                        draft.reason = "order_contradiction";
                    } else {
                        draft.verdict = Verdict::accepted;
                    }
                }
            }
            break;
        }
        case Category::duration_background: {
            auto mentioned = detail::label_mentions(draft.answer, detail::all_labels(t));
            if (!mentioned.empty()) {
                bool names_background = std::any_of(
                    mentioned.begin(), mentioned.end(), [&](const detail::LabelMention& m) {
                        return t.background.contains(m.label);
                    });
                if (names_background) {
                    draft.verdict = Verdict::accepted;
                } else {
                    draft.verdict = Verdict::rejected;
                    draft.reason = "background_mismatch";
                }
            }
            break;
        }
        case Category::pattern: {
            // Look for "X recurs after (each instance of) Y".
            std::string norm = text::normalize(draft.answer);
            size_t recur = norm.find("recur");
            if (recur != std::string::npos) {
                auto mentioned = detail::label_mentions(draft.answer, fg_labels);
                const std::string* before = nullptr;
                const std::string* after = nullptr;
                for (const auto& m : mentioned) {
                    if (m.position < recur) before = &m.label; // closest preceding mention
                    else if (!after) after = &m.label;
                }
                if (before && after) {
                    auto pairs = recurrence_pattern(t);
                    bool holds = std::any_of(pairs.begin(), pairs.end(), [&](const auto& p) {
                        return p.first == *after && p.second == *before;
                    });
                    if (holds) {
                        draft.verdict = Verdict::accepted;
                    } else {
                        draft.verdict = Verdict::rejected;
                        draft.reason = "pattern_mismatch";
                    }
                }
            }
            break;
        }
        case Category::other:
            break;
    }
    return draft;
}

// Within each clip, keep the first record per normalized question text.
inline std::vector<QARecord> dedupe(const std::vector<QARecord>& records) {
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<QARecord> out;
    for (const auto& r : records) {
        if (seen.emplace(r.clip_id, text::normalize(r.question)).second) out.push_back(r);
    }
    return out;
}

// Batch driver: dedupe first (duplicates reject with reason "duplicate"), then
// validate each survivor against its clip's timeline.
inline std::vector<QARecord> validate_batch(const std::vector<QARecord>& drafts,
                                            const std::map<std::string, Timeline>& timelines,
                                            const ValidatorConfig& cfg = {}) {
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<QARecord> out;
    for (const auto& draft : drafts) {
        QARecord r = draft;
        if (!seen.emplace(r.clip_id, text::normalize(r.question)).second) {
            r.category = classify_category(r.question);
            r.verdict = Verdict::rejected;
            r.reason = "duplicate";
            out.push_back(std::move(r));
            continue;
        }
        auto it = timelines.find(r.clip_id);
        if (it == timelines.end()) {
            r.verdict = Verdict::rejected;
            r.reason = "unknown_clip";
            out.push_back(std::move(r));
            continue;
        }
        out.push_back(validate_qa(std::move(r), it->second, cfg));
    }
    std::stable_sort(out.begin(), out.end(), [](const QARecord& a, const QARecord& b) {
        return std::tie(a.clip_id, a.record_id) < std::tie(b.clip_id, b.record_id);
    });
    return out;
}

inline nlohmann::json qa_record_to_json(const QARecord& r) {
    nlohmann::json j{{"record_id", r.record_id}, {"clip_id", r.clip_id},
                     {"question", r.question},   {"answer", r.answer},
                     {"metadata", r.metadata},   {"category", to_string(r.category)},
                     {"verdict", to_string(r.verdict)}};
    if (!r.reason.empty()) j["reason"] = r.reason;
    if (!r.split.empty()) j["split"] = r.split;
    return j;
}

inline QARecord qa_record_from_json(const nlohmann::json& j) {
    QARecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.clip_id = j.at("clip_id").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    r.metadata = j.at("metadata").get<std::string>();
    r.category = category_from_string(j.at("category").get<std::string>());
    r.verdict = j.at("verdict").get<std::string>() == "accepted"   ? Verdict::accepted
                : j.at("verdict").get<std::string>() == "rejected" ? Verdict::rejected
                                                                   : Verdict::unverifiable;
    if (j.contains("reason")) r.reason = j["reason"].get<std::string>();
    if (j.contains("split")) r.split = j["split"].get<std::string>();
    return r;
}

} // namespace forge
