#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "forge/errors.hpp"
#include "forge/genclient.hpp"
#include "forge/metrics.hpp"
#include "forge/timeline.hpp"
#include "forge/validate.hpp"

namespace forge {

// Flat TOML-style key = value file. "#" starts a comment, values may be
// quoted, [section] headers prefix keys as "section.key".
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line, section;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not 'key = value': " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ConfigError("empty key at config line " + std::to_string(line_no));
        kv[section.empty() ? key : section + "." + key] = value;
    }
    return kv;
}

struct PipelineConfig {
    // paths
    std::string annotations;     // strong-label TSV
    std::string fsd_annotations; // optional FSD CSV
    std::string ontology;
    std::string captions; // optional captions JSONL for the core pool
    std::string output_dir = ".";
    std::string checkpoint = "checkpoint.jsonl";
    std::string few_shot_file;

    TimelineOptions timeline;
    GenerationConfig generation;
    ValidatorConfig validator;
    MetricConfig metrics;

    double train_fraction = 0.8;
    double mix_ratio = 0.5;
    uint64_t split_seed = 1;
    uint64_t mix_seed = 2;
    bool with_metadata = false;
    bool strict = false;

    // eval inputs
    std::string candidates;
    std::string references;
    std::string spice_scores;
    std::string fense_scores;
    std::string categories; // item_id -> category join file
    std::string mcq_key;
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

inline double parse_real(const std::string& v, const std::string& key) {
    double out;
    if (!parse_double(v, out))
        throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
    return out;
}

} // namespace detail

inline PipelineConfig pipeline_config_from_map(const std::map<std::string, std::string>& kv) {
    PipelineConfig c;
    for (const auto& [key, value] : kv) {
        if (key == "annotations") c.annotations = value;
        else if (key == "fsd_annotations") c.fsd_annotations = value;
        else if (key == "ontology") c.ontology = value;
        else if (key == "captions") c.captions = value;
        else if (key == "output_dir") c.output_dir = value;
        else if (key == "checkpoint") c.checkpoint = value;
        else if (key == "few_shot_file") c.few_shot_file = value;
        else if (key == "clip_duration") c.timeline.clip_duration = detail::parse_real(value, key);
        else if (key == "merge_gap") c.timeline.merge_gap = detail::parse_real(value, key);
        else if (key == "filter_before_merge")
            c.timeline.filter_before_merge = detail::parse_bool(value, key);
        else if (key == "endpoint_url") c.generation.endpoint_url = value;
        else if (key == "model_name") c.generation.model_name = value;
        else if (key == "api_key_env") c.generation.api_key_env_var = value;
        else if (key == "temperature")
            c.generation.temperature = detail::parse_real(value, key);
        else if (key == "max_parallel_requests")
            c.generation.max_parallel_requests = static_cast<int>(detail::parse_real(value, key));
        else if (key == "max_retries")
            c.generation.max_retries = static_cast<int>(detail::parse_real(value, key));
        else if (key == "retry_backoff_ms")
            c.generation.retry_backoff_ms = static_cast<int>(detail::parse_real(value, key));
        else if (key == "questions_per_clip")
            c.generation.questions_per_clip = static_cast<int>(detail::parse_real(value, key));
        else if (key == "system_prompt") c.generation.system_prompt = value;
        else if (key == "keep_unverifiable")
            c.validator.keep_unverifiable = detail::parse_bool(value, key);
        else if (key == "allow_other_category")
            c.validator.allow_other_category = detail::parse_bool(value, key);
        else if (key == "max_ngram")
            c.metrics.max_ngram = static_cast<int>(detail::parse_real(value, key));
        else if (key == "gaussian_sigma")
            c.metrics.gaussian_sigma = detail::parse_real(value, key);
        else if (key == "score_scale") c.metrics.score_scale = detail::parse_real(value, key);
        else if (key == "train_fraction") c.train_fraction = detail::parse_real(value, key);
        else if (key == "mix_ratio") c.mix_ratio = detail::parse_real(value, key);
        else if (key == "split_seed")
            c.split_seed = static_cast<uint64_t>(std::stoull(value));
        else if (key == "mix_seed") c.mix_seed = static_cast<uint64_t>(std::stoull(value));
        else if (key == "with_metadata") c.with_metadata = detail::parse_bool(value, key);
        else if (key == "strict") c.strict = detail::parse_bool(value, key);
        else if (key == "candidates") c.candidates = value;
        else if (key == "references") c.references = value;
        else if (key == "spice_scores") c.spice_scores = value;
        else if (key == "fense_scores") c.fense_scores = value;
        else if (key == "categories") c.categories = value;
        else if (key == "mcq_key") c.mcq_key = value;
        else throw ConfigError("unknown config key: " + key);
    }
    return c;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
    return pipeline_config_from_map(parse_config_file(path));
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

} // namespace forge
