#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/text.hpp"

namespace forge {

struct MetricConfig {
    int max_ngram = 4;
    double gaussian_sigma = 6.0;
    double score_scale = 10.0;

    void validate() const {
        if (max_ngram < 1) throw ConfigError("max_ngram must be >= 1");
        if (gaussian_sigma <= 0.0) throw ConfigError("gaussian_sigma must be > 0");
    }
};

struct ScoredItem {
    std::string item_id;
    std::string candidate;
    std::vector<std::string> references;
};

struct ScoredCorpus {
    std::map<std::string, double> per_item;
    double corpus_score = 0.0;
};

using text::tokenize;

namespace detail {

using NgramCounts = std::map<std::string, double>;

inline NgramCounts ngram_counts(const std::vector<std::string>& tokens, int n) {
    NgramCounts counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (int j = 1; j < n; ++j) gram += " " + tokens[i + j];
        counts[gram] += 1.0;
    }
    return counts;
}

struct TfIdfVector {
    NgramCounts weights;
    double norm = 0.0;
    size_t length = 0; // unigram token count
};

inline TfIdfVector tfidf(const std::vector<std::string>& tokens, int n,
                         const NgramCounts& doc_freq, double log_corpus_size) {
    TfIdfVector v;
    v.length = tokens.size();
    for (auto& [gram, count] : ngram_counts(tokens, n)) {
        auto it = doc_freq.find(gram);
        double df = it == doc_freq.end() ? 0.0 : it->second;
        double idf = log_corpus_size - std::log(std::max(1.0, df));
        v.weights[gram] = count * idf;
        v.norm += v.weights[gram] * v.weights[gram];
    }
    v.norm = std::sqrt(v.norm);
    return v;
}

// Count-clipped TF-IDF similarity with the CIDEr-D length penalty.
inline double cider_sim(const TfIdfVector& cand, const TfIdfVector& ref, double sigma) {
    if (cand.norm == 0.0 || ref.norm == 0.0) return 0.0;
    double dot = 0.0;
    for (const auto& [gram, w] : cand.weights) {
        auto it = ref.weights.find(gram);
        if (it != ref.weights.end()) dot += std::min(w, it->second) * it->second;
    }
    double delta = static_cast<double>(cand.length) - static_cast<double>(ref.length);
    return dot / (cand.norm * ref.norm) *
           std::exp(-delta * delta / (2.0 * sigma * sigma));
}

} // namespace detail

// CIDEr-D: per-n TF-IDF cosine with count clipping and a length-difference
// Gaussian penalty, averaged over n = 1..max_ngram and over references,
// scaled by score_scale. Document frequencies come from the evaluation
// corpus's reference sets.
inline ScoredCorpus cider_d(const std::vector<ScoredItem>& items, const MetricConfig& cfg = {}) {
    cfg.validate();
    if (items.size() < 2)
        throw ValidationError(
            "cider_d needs at least 2 items: document frequencies are computed over the "
            "evaluation corpus and are degenerate for a single item");
    for (const auto& item : items)
        if (item.references.empty())
            throw ValidationError("item " + item.item_id + " has no references");

    double log_corpus_size = std::log(static_cast<double>(items.size()));

    // df per n: number of items whose reference set contains the n-gram
    std::vector<detail::NgramCounts> doc_freq(cfg.max_ngram + 1);
    for (const auto& item : items) {
        for (int n = 1; n <= cfg.max_ngram; ++n) {
            std::set<std::string> grams;
            for (const auto& ref : item.references)
                for (const auto& [gram, c] : detail::ngram_counts(tokenize(ref), n))
                    grams.insert(gram);
            for (const auto& gram : grams) doc_freq[n][gram] += 1.0;
        }
    }

    ScoredCorpus out;
    for (const auto& item : items) {
        double sum_over_n = 0.0;
        auto cand_tokens = tokenize(item.candidate);
        for (int n = 1; n <= cfg.max_ngram; ++n) {
            auto cand = detail::tfidf(cand_tokens, n, doc_freq[n], log_corpus_size);
            double sum_refs = 0.0;
            for (const auto& ref : item.references) {
                auto rv = detail::tfidf(tokenize(ref), n, doc_freq[n], log_corpus_size);
                sum_refs += detail::cider_sim(cand, rv, cfg.gaussian_sigma);
            }
            sum_over_n += sum_refs / static_cast<double>(item.references.size());
        }
        out.per_item[item.item_id] =
            sum_over_n / static_cast<double>(cfg.max_ngram) * cfg.score_scale;
    }
    double total = 0.0;
    for (const auto& [id, score] : out.per_item) total += score;
    out.corpus_score = total / static_cast<double>(out.per_item.size());
    return out;
}

struct SpiderReport {
    std::map<std::string, double> per_item;
    double corpus_score = 0.0;
    bool spider_unavailable = false; // true when SPICE scores were absent
};

// SPIDER = (CIDEr + SPICE) / 2, with SPICE ingested from an external score
// file. Without SPICE the report carries CIDEr alone, flagged.
inline SpiderReport spider(const std::map<std::string, double>& cider_scores,
                           const std::map<std::string, double>* spice_scores = nullptr) {
    SpiderReport report;
    if (!spice_scores) {
        report.per_item = cider_scores;
        report.spider_unavailable = true;
    } else {
        std::vector<std::string> missing;
        for (const auto& [id, c] : cider_scores)
            if (!spice_scores->contains(id)) missing.push_back(id);
        for (const auto& [id, s] : *spice_scores)
            if (!cider_scores.contains(id)) missing.push_back(id);
        if (!missing.empty()) {
            std::string msg = "spider score maps disagree on item ids:";
            for (const auto& id : missing) msg += " " + id;
            throw ValidationError(msg);
        }
        for (const auto& [id, c] : cider_scores)
            report.per_item[id] = (c + spice_scores->at(id)) / 2.0;
    }
    double total = 0.0;
    for (const auto& [id, score] : report.per_item) total += score;
    report.corpus_score =
        report.per_item.empty() ? 0.0 : total / static_cast<double>(report.per_item.size());
    return report;
}

struct McqItem {
    std::string item_id;
    std::vector<std::string> options;
    int correct_index = 0;
};

struct McqResult {
    double accuracy_percent = 0.0;
    size_t correct = 0;
    size_t total = 0;
};

// A prediction is correct iff exactly one option's normalized text appears in
// the normalized prediction and it is the keyed one.
inline McqResult mcq_accuracy(const std::map<std::string, std::string>& predictions,
                              const std::vector<McqItem>& key) {
    if (key.empty()) throw ValidationError("mcq key is empty");
    McqResult result;
    result.total = key.size();
    for (const auto& item : key) {
        if (item.correct_index < 0 ||
            item.correct_index >= static_cast<int>(item.options.size()))
            throw ValidationError("bad correct_index for item " + item.item_id);
        auto it = predictions.find(item.item_id);
        if (it == predictions.end()) continue; // unanswered counts as wrong
        std::string pred = text::normalize(it->second);
        int matched = -1;
        int n_matched = 0;
        for (size_t i = 0; i < item.options.size(); ++i) {
            if (text::contains_phrase(pred, text::normalize(item.options[i]))) {
                matched = static_cast<int>(i);
                ++n_matched;
            }
        }
        if (n_matched == 1 && matched == item.correct_index) ++result.correct;
    }
    result.accuracy_percent =
        100.0 * static_cast<double>(result.correct) / static_cast<double>(result.total);
    return result;
}

} // namespace forge
