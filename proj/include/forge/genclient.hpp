#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/metadata.hpp"

namespace forge {

// Appendix-style generation instruction fed as the system message.
inline const char* default_system_prompt() {
    return "Generate 5 questions and answer pairs along with metadata from the following "
           "information about the audio. The questions are used for temporal audio question "
           "answering task. Assume the audio description and audio event time information as "
           "the audio file itself. Do not ask questions whose answers are not present in the "
           "description. Write the answers in a more explanatory and human friendly manner. "
           "You can add some common senses or facts whenever it is possible along with the "
           "answer. Format each question in a single line as a JSON dictionary with keys - "
           "\"id\", \"question\", \"answer\", \"metadata\". Some examples of questions you "
           "could ask are :  What sound events occurs first?  What sound comes after the male "
           "speech at the beginning? (if male speech is present in the description) What event "
           "happens before the engine running sound?  Which event occurs towards the end ?    "
           "Is the door bell sound after the dog barking? Answer true or false and provide "
           "your reasoning steps.     Can you hear footsteps before the baby cries? Answer "
           "true or false and provide your reasoning steps.  What is the chronological order "
           "of the sound events?   What is the background sound if there's any? Please "
           "generate diverse questions with paraphrasing.";
}

struct FewShotExample {
    std::string metadata;
    std::string question;
    std::string answer;
};

struct GenerationConfig {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string model_name = "gpt-4";
    std::string api_key_env_var = "FORGE_API_KEY";
    double temperature = 1.0;
    int max_parallel_requests = 4;
    int max_retries = 3;
    int retry_backoff_ms = 250; // doubles per attempt
    int questions_per_clip = 5;
    std::string system_prompt = default_system_prompt();
    std::vector<FewShotExample> few_shot_examples;

    void validate() const {
        if (questions_per_clip < 1) throw ConfigError("questions_per_clip must be >= 1");
        if (max_parallel_requests < 1) throw ConfigError("max_parallel_requests must be >= 1");
        if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    }
};

enum class GenerationStatus { ok, failed };

struct RawGeneration {
    std::string clip_id;
    std::string request_fingerprint;
    std::string response_text;
    GenerationStatus status = GenerationStatus::failed;
};

struct PromptPayload {
    std::string system_text;
    std::string user_text;
};

inline PromptPayload build_prompt(const MetadataText& meta, const GenerationConfig& cfg) {
    std::string user;
    for (const auto& ex : cfg.few_shot_examples) {
        user += "Metadata: " + ex.metadata + "\n";
        user += "Question: " + ex.question + "\n";
        user += "Answer: " + ex.answer + "\n\n";
    }
    user += "Metadata: " + meta.text + "\n";
    user += "Generate the question and answer pairs now.";
    return {cfg.system_prompt, user};
}

namespace detail {

inline std::string fnv1a_hex(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct ParsedUrl {
    std::string scheme_host; // e.g. "http://localhost:8089"
    std::string path;        // e.g. "/v1/chat/completions"
};

inline ParsedUrl parse_url(const std::string& url) {
    size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint_url must include a scheme: " + url);
    size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

} // namespace detail

inline std::string request_fingerprint(const PromptPayload& prompt, const GenerationConfig& cfg) {
    nlohmann::json key{{"system", prompt.system_text},
                       {"user", prompt.user_text},
                       {"model", cfg.model_name},
                       {"temperature", cfg.temperature}};
    return detail::fnv1a_hex(key.dump());
}

// Response lines split, markdown fences and list numbering stripped, each line
// parsed as a JSON object with the four required keys.
struct GenerationDraft {
    std::string clip_id;
    std::string id;
    std::string question;
    std::string answer;
    std::string metadata;
};

struct GenerationReject {
    std::string clip_id;
    std::string line;
    std::string reason;
};

struct ParsedGeneration {
    std::vector<GenerationDraft> drafts;
    std::vector<GenerationReject> rejects;
};

namespace detail {

inline std::string strip_line_decorations(std::string line) {
    auto ltrim = [](std::string& s) {
        size_t i = s.find_first_not_of(" \t");
        s.erase(0, i == std::string::npos ? s.size() : i);
    };
    auto rtrim = [](std::string& s) {
        size_t i = s.find_last_not_of(" \t\r");
        s.erase(i == std::string::npos ? 0 : i + 1);
    };
    ltrim(line);
    rtrim(line);
    if (line.rfind("```", 0) == 0) return ""; // fence line carries no content
    // "1. {...}" / "1) {...}" / "- {...}" list decorations
    size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        line.erase(0, i + 1);
        ltrim(line);
    } else if (!line.empty() && (line[0] == '-' || line[0] == '*') &&
               line.size() > 1 && line[1] == ' ') {
        line.erase(0, 2);
        ltrim(line);
    }
    return line;
}

} // namespace detail

inline ParsedGeneration parse_generation(const RawGeneration& raw) {
    if (raw.status != GenerationStatus::ok)
        throw ValidationError("cannot parse a failed generation for clip " + raw.clip_id);
    ParsedGeneration out;
    for (auto& line : detail::split_lines(raw.response_text)) {
        std::string candidate = detail::strip_line_decorations(line);
        if (candidate.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(candidate);
        } catch (const nlohmann::json::parse_error&) {
            out.rejects.push_back({raw.clip_id, line, "invalid_json"});
            continue;
        }
        if (!obj.is_object()) {
            out.rejects.push_back({raw.clip_id, line, "not_an_object"});
            continue;
        }
        bool ok = true;
        for (const char* key : {"id", "question", "answer", "metadata"}) {
            if (!obj.contains(key) || !obj[key].is_string() ||
                obj[key].get<std::string>().empty()) {
                out.rejects.push_back({raw.clip_id, line, std::string("missing_key:") + key});
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        out.drafts.push_back({raw.clip_id, obj["id"].get<std::string>(),
                              obj["question"].get<std::string>(),
                              obj["answer"].get<std::string>(),
                              obj["metadata"].get<std::string>()});
    }
    return out;
}

// Checkpoint: append-only JSON lines, one completed generation per line keyed
// by its request fingerprint. A re-run skips fingerprints already present.
inline std::vector<RawGeneration> load_checkpoint(const std::string& path) {
    std::vector<RawGeneration> done;
    std::ifstream in(path);
    if (!in) return done;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        done.push_back({j.at("clip_id").get<std::string>(),
                        j.at("fingerprint").get<std::string>(),
                        j.at("response").get<std::string>(),
                        j.at("status").get<std::string>() == "ok" ? GenerationStatus::ok
                                                                  : GenerationStatus::failed});
    }
    return done;
}

struct GenerationRunStats {
    size_t requests_sent = 0;
    size_t resumed_from_checkpoint = 0;
    size_t failed = 0;
};

inline std::vector<RawGeneration> generate_for_clips(const std::vector<MetadataText>& clips,
                                                     const GenerationConfig& cfg,
                                                     const std::string& checkpoint_path,
                                                     GenerationRunStats* stats = nullptr) {
    cfg.validate();
    const char* api_key = std::getenv(cfg.api_key_env_var.c_str());
    if (!api_key || !*api_key)
        throw ConfigError("API key environment variable " + cfg.api_key_env_var +
                          " is not set");

    // keyed by clip and fingerprint: distinct clips can produce identical
    // prompts, and each still owns its own checkpoint entry
    std::map<std::string, RawGeneration> done;
    for (auto& g : load_checkpoint(checkpoint_path))
        done.emplace(g.clip_id + ":" + g.request_fingerprint, std::move(g));

    struct Job {
        MetadataText meta;
        PromptPayload prompt;
        std::string fingerprint;
    };
    std::vector<Job> jobs;
    std::vector<RawGeneration> results;
    for (const auto& meta : clips) {
        PromptPayload prompt = build_prompt(meta, cfg);
        std::string fp = request_fingerprint(prompt, cfg);
        auto it = done.find(meta.clip_id + ":" + fp);
        if (it != done.end() && it->second.status == GenerationStatus::ok) {
            results.push_back(it->second);
            if (stats) ++stats->resumed_from_checkpoint;
        } else {
            jobs.push_back({meta, std::move(prompt), std::move(fp)});
        }
    }

    auto url = detail::parse_url(cfg.endpoint_url);
    std::mutex sink_mutex;
    std::ofstream checkpoint(checkpoint_path, std::ios::app);
    std::atomic<size_t> next_job{0};
    std::atomic<size_t> requests_sent{0};

    auto worker = [&] {
        httplib::Client client(url.scheme_host);
        client.set_read_timeout(120, 0);
        while (true) {
            size_t i = next_job.fetch_add(1);
            if (i >= jobs.size()) break;
            const Job& job = jobs[i];
            nlohmann::json body{{"model", cfg.model_name},
                                {"temperature", cfg.temperature},
                                {"messages",
                                 {{{"role", "system"}, {"content", job.prompt.system_text}},
                                  {{"role", "user"}, {"content", job.prompt.user_text}}}}};
            httplib::Headers headers{{"Authorization", std::string("Bearer ") + api_key}};

            RawGeneration gen{job.meta.clip_id, job.fingerprint, "", GenerationStatus::failed};
            int backoff = cfg.retry_backoff_ms;
            for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
                if (attempt > 0) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
                    backoff *= 2;
                }
                ++requests_sent;
                auto res = client.Post(url.path, headers, body.dump(), "application/json");
                if (!res || res->status != 200) continue;
                try {
                    auto j = nlohmann::json::parse(res->body);
                    gen.response_text =
                        j.at("choices").at(0).at("message").at("content").get<std::string>();
                    gen.status = GenerationStatus::ok;
                    break;
                } catch (const nlohmann::json::exception&) {
                    continue; // malformed body, retry
                }
            }
            std::lock_guard<std::mutex> lock(sink_mutex);
            checkpoint << nlohmann::json{
                             {"clip_id", gen.clip_id},
                             {"fingerprint", gen.request_fingerprint},
                             {"response", gen.response_text},
                             {"status", gen.status == GenerationStatus::ok ? "ok" : "failed"}}
                              .dump()
                       << '\n';
            checkpoint.flush();
            results.push_back(gen);
        }
    };

    size_t n_workers = std::min<size_t>(cfg.max_parallel_requests, std::max<size_t>(jobs.size(), 1));
    std::vector<std::thread> pool;
    for (size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::sort(results.begin(), results.end(),
              [](const RawGeneration& a, const RawGeneration& b) { return a.clip_id < b.clip_id; });
    if (stats) {
        stats->requests_sent = requests_sent;
        for (const auto& r : results)
            if (r.status == GenerationStatus::failed) ++stats->failed;
    }
    return results;
}

} // namespace forge
