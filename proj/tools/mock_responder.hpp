#pragma once

// Offline stand-in for the chat-completions endpoint: reads the metadata out
// of the user message and answers with five oracle-grounded QA JSON lines in
// the same shape the real model is instructed to produce.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/metadata.hpp"

namespace forge::mock {

inline std::string metadata_from_user_text(const std::string& user_text) {
    size_t pos = user_text.rfind("Metadata: ");
    if (pos == std::string::npos) return "";
    size_t start = pos + 10;
    size_t end = user_text.find('\n', start);
    return user_text.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

inline std::string qa_response_for_metadata(const std::string& metadata) {
    ParsedMetadata parsed = parse_metadata(metadata);
    const auto& fg = parsed.foreground;

    std::vector<std::string> distinct;
    std::map<std::string, int> counts;
    for (const auto& label : fg) {
        if (!counts.count(label)) distinct.push_back(label);
        ++counts[label];
    }

    std::vector<std::pair<std::string, std::string>> lines; // (question, answer)

    if (!fg.empty()) {
        const std::string& l0 = distinct.front();
        lines.emplace_back("How many times does the " + l0 + " occur?",
                           "The " + l0 + " occurs " + std::to_string(counts[l0]) +
                               " times in the clip.");

        std::string order;
        for (size_t i = 0; i < distinct.size(); ++i) {
            if (i) order += ", then ";
            order += distinct[i];
        }
        lines.emplace_back("What is the chronological order of the sound events?",
                           "The order of events is: " + order + ".");
    }

    if (distinct.size() >= 2) {
        lines.emplace_back("Is the " + distinct[1] + " heard after the " + distinct[0] + "?",
                           "Yes, the " + distinct[1] + " comes after the " + distinct[0] + ".");
    } else if (!fg.empty()) {
        lines.emplace_back("What is the number of times the " + distinct[0] + " happens?",
                           "It happens " + std::to_string(counts[distinct[0]]) + " times.");
    }

    if (!parsed.background.empty()) {
        const std::string& bg = parsed.background.front();
        lines.emplace_back("What ambient sound persists throughout the audio clip?",
                           "The " + bg + " persists throughout the audio clip.");
    } else if (!fg.empty()) {
        lines.emplace_back("What's the sequence of the audio events in the clip?",
                           "The sequence is " + distinct.front() +
                               (distinct.size() > 1 ? " followed by the later events." : "."));
    }

    // recurrence pair: every occurrence of x with a successor is followed by y
    std::string rx, ry;
    for (const auto& x : distinct) {
        if (counts[x] < 2) continue;
        std::string successor;
        bool consistent = true, any = false;
        for (size_t i = 0; i + 1 < fg.size(); ++i) {
            if (fg[i] != x) continue;
            if (!any) {
                successor = fg[i + 1];
                any = true;
            } else if (fg[i + 1] != successor) {
                consistent = false;
                break;
            }
        }
        if (any && consistent) {
            rx = x;
            ry = successor;
            break;
        }
    }
    if (!rx.empty()) {
        lines.emplace_back("Which sound recurs each time the " + rx + " is heard?",
                           "The " + ry + " recurs after each instance of " + rx + ".");
    } else if (!fg.empty()) {
        lines.emplace_back("In what order of events does the clip unfold?",
                           "The order of events is: " +
                               (distinct.size() > 1 ? distinct[0] + ", then " + distinct[1]
                                                    : distinct[0]) +
                               ".");
    }

    while (lines.size() < 5 && !fg.empty()) {
        lines.emplace_back("What is the order of the first sounds heard (variant " +
                               std::to_string(lines.size()) + ")?",
                           "The order of events begins with " + distinct.front() + ".");
    }

    std::string response;
    int id = 0;
    for (const auto& [q, a] : lines) {
        if (id >= 5) break;
        response += nlohmann::json{{"id", std::to_string(++id)},
                                   {"question", q},
                                   {"answer", a},
                                   {"metadata", metadata}}
                        .dump();
        response += '\n';
    }
    return response;
}

// Full chat-completions response body for a request body.
inline std::string completion_body(const std::string& request_body) {
    auto req = nlohmann::json::parse(request_body);
    std::string user_text;
    for (const auto& msg : req.at("messages"))
        if (msg.at("role") == "user") user_text = msg.at("content").get<std::string>();
    std::string content = qa_response_for_metadata(metadata_from_user_text(user_text));
    nlohmann::json res{
        {"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
    return res.dump();
}

} // namespace forge::mock
