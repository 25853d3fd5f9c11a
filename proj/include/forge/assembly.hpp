#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/validate.hpp"

namespace forge {

// splitmix64: tiny, seedable, and bit-identical everywhere. Chosen over the
// standard library engines so shuffles reproduce across implementations.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) via modulo; bias is irrelevant at dataset scale.
    uint64_t next_below(uint64_t bound) { return next() % bound; }

private:
    uint64_t state_;
};

template <typename T>
void fisher_yates_shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (size_t i = items.size(); i > 1; --i)
        std::swap(items[i - 1], items[rng.next_below(i)]);
}

enum class TaskTag { temporal, classification, captioning, tagging };

inline std::string to_string(TaskTag t) {
    switch (t) {
        case TaskTag::temporal: return "temporal";
        case TaskTag::classification: return "classification";
        case TaskTag::captioning: return "captioning";
        case TaskTag::tagging: return "tagging";
    }
    return "temporal";
}

inline TaskTag task_tag_from_string(const std::string& s) {
    if (s == "temporal") return TaskTag::temporal;
    if (s == "classification") return TaskTag::classification;
    if (s == "captioning") return TaskTag::captioning;
    if (s == "tagging") return TaskTag::tagging;
    throw ParseError("unknown task tag: " + s);
}

struct TrainingExample {
    std::string audio_id;
    std::string instruction;
    std::string metadata_input; // populated only in with-metadata mixes
    std::string output;
    TaskTag task_tag = TaskTag::temporal;

    friend bool operator==(const TrainingExample&, const TrainingExample&) = default;
};

struct CurriculumMix {
    std::vector<TrainingExample> t_temporal;
    std::vector<TrainingExample> t_core;
    std::vector<TrainingExample> t_total;
    double ratio = 0.5;
    uint64_t seed = 0;
    bool with_metadata = false;
};

struct SplitResult {
    std::vector<QARecord> train;
    std::vector<QARecord> test;
    std::vector<std::string> train_clips;
    std::vector<std::string> test_clips;
};

// Grouped split by clip so no clip's records leak across sides. Clip ids are
// sorted, shuffled with the seeded generator, and the first
// floor(train_fraction * n) go to train.
inline SplitResult split_dataset(const std::vector<QARecord>& records, double train_fraction,
                                 uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ConfigError("train_fraction must be in (0, 1)");
    std::set<std::string> clip_set;
    for (const auto& r : records) clip_set.insert(r.clip_id);
    if (clip_set.size() < 2)
        throw ValidationError("split needs at least 2 clips, got " +
                              std::to_string(clip_set.size()));

    std::vector<std::string> clips(clip_set.begin(), clip_set.end());
    SplitMix64 rng(seed);
    fisher_yates_shuffle(clips, rng);

    size_t n_train = static_cast<size_t>(train_fraction * static_cast<double>(clips.size()));
    SplitResult result;
    result.train_clips.assign(clips.begin(), clips.begin() + n_train);
    result.test_clips.assign(clips.begin() + n_train, clips.end());

    std::set<std::string> train_set(result.train_clips.begin(), result.train_clips.end());
    for (const auto& r : records) {
        QARecord tagged = r;
        if (train_set.contains(r.clip_id)) {
            tagged.split = "train";
            result.train.push_back(std::move(tagged));
        } else {
            tagged.split = "test";
            result.test.push_back(std::move(tagged));
        }
    }
    return result;
}

inline TrainingExample training_example_from_qa(const QARecord& r, bool with_metadata) {
    TrainingExample ex;
    ex.audio_id = r.clip_id;
    ex.instruction = r.question;
    ex.output = r.answer;
    ex.task_tag = TaskTag::temporal;
    if (with_metadata) ex.metadata_input = r.metadata;
    return ex;
}

// T_total = shuffled(T_temporal + sampled core), cores drawn evenly across the
// task tags present in the pool.
inline CurriculumMix mix_curriculum(const std::vector<TrainingExample>& temporal,
                                    const std::vector<TrainingExample>& core_pool,
                                    double ratio, uint64_t seed, bool with_metadata) {
    if (ratio <= 0.0 || ratio > 1.0) throw ConfigError("ratio must be in (0, 1]");

    CurriculumMix mix;
    mix.ratio = ratio;
    mix.seed = seed;
    mix.with_metadata = with_metadata;
    mix.t_temporal = temporal;
    if (with_metadata) {
        // metadata_input comes along from the QA conversion; nothing extra here
    } else {
        for (auto& ex : mix.t_temporal) ex.metadata_input.clear();
    }

    size_t n_core = static_cast<size_t>(
        static_cast<double>(temporal.size()) * (1.0 - ratio) / ratio + 0.5);

    SplitMix64 rng(seed);
    if (n_core > 0) {
        std::map<TaskTag, std::vector<TrainingExample>> by_tag;
        for (const auto& ex : core_pool) by_tag[ex.task_tag].push_back(ex);
        if (by_tag.empty())
            throw ValidationError("core pool is empty but " + std::to_string(n_core) +
                                  " core examples are required");

        size_t k = by_tag.size();
        size_t base = n_core / k, rem = n_core % k;
        size_t tag_index = 0;
        for (auto& [tag, group] : by_tag) {
            size_t quota = base + (tag_index < rem ? 1 : 0);
            ++tag_index;
            if (group.size() < quota)
                throw ValidationError("insufficient core pool for task '" + to_string(tag) +
                                      "': need " + std::to_string(quota) + ", have " +
                                      std::to_string(group.size()));
            fisher_yates_shuffle(group, rng);
            mix.t_core.insert(mix.t_core.end(), group.begin(), group.begin() + quota);
        }
    }

    mix.t_total = mix.t_temporal;
    mix.t_total.insert(mix.t_total.end(), mix.t_core.begin(), mix.t_core.end());
    fisher_yates_shuffle(mix.t_total, rng);
    return mix;
}

inline nlohmann::json training_example_to_json(const TrainingExample& ex) {
    return {{"audio_id", ex.audio_id},
            {"instruction", ex.instruction},
            {"metadata", ex.metadata_input.empty() ? nlohmann::json(nullptr)
                                                   : nlohmann::json(ex.metadata_input)},
            {"output", ex.output},
            {"task", to_string(ex.task_tag)}};
}

inline TrainingExample training_example_from_json(const nlohmann::json& j) {
    TrainingExample ex;
    ex.audio_id = j.at("audio_id").get<std::string>();
    ex.instruction = j.at("instruction").get<std::string>();
    if (j.contains("metadata") && !j["metadata"].is_null())
        ex.metadata_input = j["metadata"].get<std::string>();
    ex.output = j.at("output").get<std::string>();
    ex.task_tag = task_tag_from_string(j.at("task").get<std::string>());
    return ex;
}

inline nlohmann::json mix_manifest(const CurriculumMix& mix) {
    std::map<std::string, size_t> per_tag;
    for (const auto& ex : mix.t_total) ++per_tag[to_string(ex.task_tag)];
    return {{"ratio", mix.ratio},
            {"seed", mix.seed},
            {"with_metadata", mix.with_metadata},
            {"n_temporal", mix.t_temporal.size()},
            {"n_core", mix.t_core.size()},
            {"n_total", mix.t_total.size()},
            {"per_task", per_tag}};
}

} // namespace forge
