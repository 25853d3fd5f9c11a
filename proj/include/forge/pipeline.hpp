#pragma once

#include <map>
#include <string>
#include <vector>

#include "forge/annotation.hpp"
#include "forge/assembly.hpp"
#include "forge/timeline.hpp"

namespace forge {

// Core-AQA examples synthesized from the ingested corpora: tagging and label
// classification from clip labels, captioning from an optional caption map.
inline std::vector<TrainingExample> build_core_pool(
    const std::vector<ClipAnnotation>& clips,
    const std::map<std::string, std::string>& captions = {}) {
    std::vector<TrainingExample> pool;
    for (const auto& clip : clips) {
        if (!clip.segments.empty()) {
            std::vector<std::string> labels;
            for (const auto& s : clip.segments)
                if (labels.empty() || labels.back() != s.label) labels.push_back(s.label);
            std::sort(labels.begin(), labels.end());
            labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

            TrainingExample tag;
            tag.audio_id = clip.clip_id;
            tag.instruction = "Tag the sound events present in the audio clip.";
            tag.output = text::join(labels, ", ");
            tag.task_tag = TaskTag::tagging;
            pool.push_back(std::move(tag));

            // classification target: label with the largest total airtime
            std::map<std::string, double> airtime;
            for (const auto& s : clip.segments) airtime[s.label] += s.end - s.start;
            auto best = std::max_element(airtime.begin(), airtime.end(),
                                         [](const auto& a, const auto& b) {
                                             if (a.second != b.second) return a.second < b.second;
                                             return a.first > b.first;
                                         });
            TrainingExample cls;
            cls.audio_id = clip.clip_id;
            cls.instruction = "Which sound category best describes this audio clip?";
            cls.output = best->first;
            cls.task_tag = TaskTag::classification;
            pool.push_back(std::move(cls));
        }
        auto cap = captions.find(clip.clip_id);
        if (cap != captions.end()) {
            TrainingExample ex;
            ex.audio_id = clip.clip_id;
            ex.instruction = "Describe the audio clip.";
            ex.output = cap->second;
            ex.task_tag = TaskTag::captioning;
            pool.push_back(std::move(ex));
        }
    }
    return pool;
}

inline std::map<std::string, Timeline> build_timelines(const std::vector<ClipAnnotation>& clips,
                                                       const TimelineOptions& opt) {
    std::map<std::string, Timeline> timelines;
    for (const auto& clip : clips) timelines[clip.clip_id] = build_timeline(clip, opt);
    return timelines;
}

} // namespace forge
