// forge: toolchain for synthesizing, validating, and assembling
// temporal-reasoning audio QA datasets from strongly-labeled annotations.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "forge/annotation.hpp"
#include "forge/assembly.hpp"
#include "forge/config.hpp"
#include "forge/genclient.hpp"
#include "forge/metadata.hpp"
#include "forge/metrics.hpp"
#include "forge/pipeline.hpp"
#include "forge/text.hpp"
#include "forge/timeline.hpp"
#include "forge/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string out_path(const forge::PipelineConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

void require_input(const std::string& path, const std::string& what,
                   const std::string& producer) {
    if (path.empty())
        throw forge::ConfigError("config does not name a " + what + " file");
    if (!fs::exists(path))
        throw forge::ConfigError("missing " + what + " file: " + path +
                                 (producer.empty() ? "" : " (produce it with `forge " +
                                                             producer + "`)"));
}

std::map<std::string, std::string> load_jsonl_map(const std::string& path,
                                                  const char* key_field,
                                                  const char* value_field) {
    std::map<std::string, std::string> out;
    for (const auto& line : forge::detail::split_lines(forge::read_file(path))) {
        if (line.empty()) continue;
        auto j = json::parse(line);
        out[j.at(key_field).get<std::string>()] = j.at(value_field).get<std::string>();
    }
    return out;
}

std::map<std::string, double> load_score_file(const std::string& path) {
    std::map<std::string, double> out;
    for (const auto& line : forge::detail::split_lines(forge::read_file(path))) {
        if (line.empty()) continue;
        auto j = json::parse(line);
        out[j.at("item_id").get<std::string>()] = j.at("score").get<double>();
    }
    return out;
}

std::vector<forge::QARecord> load_qa_jsonl(const std::string& path) {
    std::vector<forge::QARecord> records;
    for (const auto& line : forge::detail::split_lines(forge::read_file(path))) {
        if (line.empty()) continue;
        records.push_back(forge::qa_record_from_json(json::parse(line)));
    }
    return records;
}

std::string qa_to_jsonl(const std::vector<forge::QARecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += forge::qa_record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

int cmd_ingest(const forge::PipelineConfig& cfg) {
    require_input(cfg.ontology, "ontology", "");
    forge::Ontology ontology = forge::parse_ontology(forge::read_file(cfg.ontology));

    forge::IngestResult result;
    if (!cfg.annotations.empty()) {
        require_input(cfg.annotations, "annotations", "");
        result = forge::parse_strong_labels(forge::read_file(cfg.annotations), ontology,
                                            cfg.strict);
    }
    if (!cfg.fsd_annotations.empty()) {
        require_input(cfg.fsd_annotations, "fsd_annotations", "");
        auto fsd = forge::parse_fsd_csv(forge::read_file(cfg.fsd_annotations),
                                        cfg.timeline.clip_duration);
        result.clips.insert(result.clips.end(), fsd.clips.begin(), fsd.clips.end());
        result.warnings.insert(result.warnings.end(), fsd.warnings.begin(),
                               fsd.warnings.end());
    }
    if (result.clips.empty() && cfg.annotations.empty())
        throw forge::ConfigError("config names neither annotations nor fsd_annotations");

    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

    forge::write_file(out_path(cfg, "clips.jsonl"), forge::clips_to_jsonl(result.clips));

    size_t eligible = 0;
    std::map<std::string, size_t> rejections;
    for (const auto& clip : result.clips) {
        auto t = forge::build_timeline(clip, cfg.timeline);
        if (t.eligible) ++eligible;
        else ++rejections[t.rejection_reason];
    }
    json stats{{"clips_parsed", result.clips.size()},
               {"eligible", eligible},
               {"rejections", rejections},
               {"warnings", result.warnings.size()}};
    forge::write_file(out_path(cfg, "ingest_stats.json"), stats.dump(2) + "\n");
    std::cout << stats.dump(2) << "\n";
    return 0;
}

int cmd_generate(const forge::PipelineConfig& cfg) {
    std::string clips_path = out_path(cfg, "clips.jsonl");
    require_input(clips_path, "canonical clips", "ingest");
    auto clips = forge::clips_from_jsonl(forge::read_file(clips_path));

    forge::GenerationConfig gen_cfg = cfg.generation;
    if (!cfg.few_shot_file.empty()) {
        for (const auto& line : forge::detail::split_lines(forge::read_file(cfg.few_shot_file))) {
            if (line.empty()) continue;
            auto j = json::parse(line);
            gen_cfg.few_shot_examples.push_back({j.at("metadata").get<std::string>(),
                                                 j.at("question").get<std::string>(),
                                                 j.at("answer").get<std::string>()});
        }
    }

    std::vector<forge::MetadataText> metas;
    for (const auto& clip : clips) {
        // FSD clips carry no ordering information; temporal generation only
        // runs on strong-label clips that pass the eligibility filter.
        if (clip.source != forge::AnnotationSource::strong_tsv) continue;
        auto t = forge::build_timeline(clip, cfg.timeline);
        if (t.eligible) metas.push_back(forge::render_metadata(t));
    }

    forge::GenerationRunStats run_stats;
    auto generations = forge::generate_for_clips(
        metas, gen_cfg, (fs::path(cfg.output_dir) / cfg.checkpoint).string(), &run_stats);

    std::string out;
    for (const auto& g : generations) {
        out += json{{"clip_id", g.clip_id},
                    {"fingerprint", g.request_fingerprint},
                    {"response", g.response_text},
                    {"status", g.status == forge::GenerationStatus::ok ? "ok" : "failed"}}
                   .dump();
        out += '\n';
    }
    forge::write_file(out_path(cfg, "raw_generations.jsonl"), out);

    json stats{{"clips_eligible", metas.size()},
               {"requests_sent", run_stats.requests_sent},
               {"resumed_from_checkpoint", run_stats.resumed_from_checkpoint},
               {"failed", run_stats.failed}};
    forge::write_file(out_path(cfg, "generate_stats.json"), stats.dump(2) + "\n");
    std::cout << stats.dump(2) << "\n";
    if (run_stats.failed > 0 && run_stats.failed == generations.size()) return 3;
    return 0;
}

int cmd_validate(const forge::PipelineConfig& cfg) {
    std::string raw_path = out_path(cfg, "raw_generations.jsonl");
    std::string clips_path = out_path(cfg, "clips.jsonl");
    require_input(raw_path, "raw generations", "generate");
    require_input(clips_path, "canonical clips", "ingest");

    auto clips = forge::clips_from_jsonl(forge::read_file(clips_path));
    auto timelines = forge::build_timelines(clips, cfg.timeline);

    std::vector<forge::QARecord> drafts;
    std::vector<forge::GenerationReject> rejects;
    std::map<std::string, int> per_clip_seq;
    for (const auto& line : forge::detail::split_lines(forge::read_file(raw_path))) {
        if (line.empty()) continue;
        auto j = json::parse(line);
        forge::RawGeneration raw{j.at("clip_id").get<std::string>(),
                                 j.at("fingerprint").get<std::string>(),
                                 j.at("response").get<std::string>(),
                                 j.at("status").get<std::string>() == "ok"
                                     ? forge::GenerationStatus::ok
                                     : forge::GenerationStatus::failed};
        if (raw.status != forge::GenerationStatus::ok) continue;
        auto parsed = forge::parse_generation(raw);
        for (const auto& d : parsed.drafts) {
            forge::QARecord r;
            char seq[8];
            std::snprintf(seq, sizeof(seq), "q%03d", ++per_clip_seq[d.clip_id]);
            r.record_id = seq;
            r.clip_id = d.clip_id;
            r.question = d.question;
            r.answer = d.answer;
            r.metadata = d.metadata;
            drafts.push_back(std::move(r));
        }
        rejects.insert(rejects.end(), parsed.rejects.begin(), parsed.rejects.end());
    }

    auto validated = forge::validate_batch(drafts, timelines, cfg.validator);
    forge::write_file(out_path(cfg, "qa.jsonl"), qa_to_jsonl(validated));

    std::string reject_lines;
    for (const auto& r : rejects) {
        reject_lines += json{{"clip_id", r.clip_id}, {"line", r.line}, {"reason", r.reason}}
                            .dump();
        reject_lines += '\n';
    }
    forge::write_file(out_path(cfg, "parse_rejects.jsonl"), reject_lines);

    std::map<std::string, size_t> by_verdict, by_category;
    for (const auto& r : validated) {
        ++by_verdict[forge::to_string(r.verdict)];
        ++by_category[forge::to_string(r.category)];
    }
    json stats{{"parsed_drafts", drafts.size()},
               {"parse_rejects", rejects.size()},
               {"verdicts", by_verdict},
               {"categories", by_category}};
    forge::write_file(out_path(cfg, "validate_stats.json"), stats.dump(2) + "\n");
    std::cout << stats.dump(2) << "\n";
    return 0;
}

std::vector<forge::QARecord> usable_records(const std::vector<forge::QARecord>& records,
                                            const forge::ValidatorConfig& vcfg) {
    std::vector<forge::QARecord> out;
    for (const auto& r : records) {
        if (r.verdict == forge::Verdict::accepted ||
            (vcfg.keep_unverifiable && r.verdict == forge::Verdict::unverifiable))
            out.push_back(r);
    }
    return out;
}

int cmd_split(const forge::PipelineConfig& cfg) {
    std::string qa_path = out_path(cfg, "qa.jsonl");
    require_input(qa_path, "validated QA", "validate");
    auto records = usable_records(load_qa_jsonl(qa_path), cfg.validator);

    auto split = forge::split_dataset(records, cfg.train_fraction, cfg.split_seed);
    forge::write_file(out_path(cfg, "train.jsonl"), qa_to_jsonl(split.train));
    forge::write_file(out_path(cfg, "test.jsonl"), qa_to_jsonl(split.test));

    json stats{{"train_records", split.train.size()},
               {"test_records", split.test.size()},
               {"train_clips", split.train_clips.size()},
               {"test_clips", split.test_clips.size()},
               {"train_fraction", cfg.train_fraction},
               {"seed", cfg.split_seed}};
    forge::write_file(out_path(cfg, "split_stats.json"), stats.dump(2) + "\n");
    std::cout << stats.dump(2) << "\n";
    return 0;
}

int cmd_mix(const forge::PipelineConfig& cfg) {
    std::string train_path = out_path(cfg, "train.jsonl");
    std::string clips_path = out_path(cfg, "clips.jsonl");
    require_input(train_path, "train split", "split");
    require_input(clips_path, "canonical clips", "ingest");

    auto train = load_qa_jsonl(train_path);
    std::vector<forge::TrainingExample> temporal;
    for (const auto& r : train)
        temporal.push_back(forge::training_example_from_qa(r, cfg.with_metadata));

    auto clips = forge::clips_from_jsonl(forge::read_file(clips_path));
    std::map<std::string, std::string> captions;
    if (!cfg.captions.empty()) {
        require_input(cfg.captions, "captions", "");
        captions = load_jsonl_map(cfg.captions, "clip_id", "caption");
    }
    auto core_pool = forge::build_core_pool(clips, captions);

    auto mix = forge::mix_curriculum(temporal, core_pool, cfg.mix_ratio, cfg.mix_seed,
                                     cfg.with_metadata);

    std::string out;
    for (const auto& ex : mix.t_total) {
        out += forge::training_example_to_json(ex).dump();
        out += '\n';
    }
    forge::write_file(out_path(cfg, "train_mix.jsonl"), out);

    json manifest = forge::mix_manifest(mix);
    manifest["sources"] = {
        {"train", forge::detail::fnv1a_hex(forge::read_file(train_path))},
        {"clips", forge::detail::fnv1a_hex(forge::read_file(clips_path))}};
    forge::write_file(out_path(cfg, "manifest.json"), manifest.dump(2) + "\n");
    std::cout << manifest.dump(2) << "\n";
    return 0;
}

int cmd_eval(const forge::PipelineConfig& cfg) {
    json report;
    if (!cfg.candidates.empty() || !cfg.references.empty()) {
        require_input(cfg.candidates, "candidates", "");
        require_input(cfg.references, "references", "");
        auto candidates = load_jsonl_map(cfg.candidates, "item_id", "text");
        std::map<std::string, std::vector<std::string>> references;
        for (const auto& line : forge::detail::split_lines(forge::read_file(cfg.references))) {
            if (line.empty()) continue;
            auto j = json::parse(line);
            references[j.at("item_id").get<std::string>()] =
                j.at("texts").get<std::vector<std::string>>();
        }

        std::vector<forge::ScoredItem> items;
        for (const auto& [id, text] : candidates) {
            auto it = references.find(id);
            if (it == references.end())
                throw forge::ValidationError("candidate " + id + " has no references");
            items.push_back({id, text, it->second});
        }

        auto cider = forge::cider_d(items, cfg.metrics);
        report["cider_d"] = {{"corpus", cider.corpus_score}, {"per_item", cider.per_item}};

        std::optional<std::map<std::string, double>> spice;
        if (!cfg.spice_scores.empty()) {
            require_input(cfg.spice_scores, "SPICE scores", "");
            spice = load_score_file(cfg.spice_scores);
        }
        auto sp = forge::spider(cider.per_item, spice ? &*spice : nullptr);
        report["spider"] = {{"corpus", sp.corpus_score},
                            {"per_item", sp.per_item},
                            {"spider_unavailable", sp.spider_unavailable}};

        if (!cfg.fense_scores.empty()) {
            require_input(cfg.fense_scores, "FENSE scores", "");
            auto fense = load_score_file(cfg.fense_scores);
            double total = 0.0;
            for (const auto& [id, s] : fense) total += s;
            report["fense"] = {{"corpus", fense.empty() ? 0.0 : total / fense.size()},
                               {"per_item", fense}};
        }

        if (!cfg.categories.empty()) {
            require_input(cfg.categories, "categories", "");
            auto categories = load_jsonl_map(cfg.categories, "item_id", "category");
            std::map<std::string, std::pair<double, size_t>> acc;
            for (const auto& [id, score] : cider.per_item) {
                auto it = categories.find(id);
                std::string cat = it == categories.end() ? "uncategorized" : it->second;
                acc[cat].first += score;
                acc[cat].second += 1;
            }
            json per_category;
            for (const auto& [cat, sum_count] : acc)
                per_category[cat] = sum_count.first / static_cast<double>(sum_count.second);
            report["cider_d"]["per_category"] = per_category;
        }
    }

    if (!cfg.mcq_key.empty()) {
        require_input(cfg.mcq_key, "MCQ key", "");
        require_input(cfg.candidates, "candidates", "");
        auto predictions = load_jsonl_map(cfg.candidates, "item_id", "text");
        std::vector<forge::McqItem> key;
        for (const auto& line : forge::detail::split_lines(forge::read_file(cfg.mcq_key))) {
            if (line.empty()) continue;
            auto j = json::parse(line);
            key.push_back({j.at("item_id").get<std::string>(),
                           j.at("options").get<std::vector<std::string>>(),
                           j.at("correct_index").get<int>()});
        }
        auto mcq = forge::mcq_accuracy(predictions, key);
        report["mcq"] = {{"accuracy_percent", mcq.accuracy_percent},
                         {"correct", mcq.correct},
                         {"total", mcq.total}};
    }

    if (report.empty())
        throw forge::ConfigError(
            "eval needs candidates/references and/or mcq_key in the config");

    forge::write_file(out_path(cfg, "report.json"), report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal audio QA dataset pipeline"};
    app.require_subcommand(1);
    app.fallthrough(); // accept app-level options after the subcommand name

    std::string config_path;
    bool strict_flag = false;
    bool with_metadata_flag = false;
    std::optional<uint64_t> seed_override;

    app.add_option("--config", config_path, "pipeline config file")->required();
    app.add_flag("--strict", strict_flag, "fail on malformed input rows");
    app.add_flag("--with-metadata", with_metadata_flag,
                 "populate metadata on temporal training examples");
    app.add_option("--seed", seed_override, "override split and mix seeds");

    auto* ingest = app.add_subcommand("ingest", "parse annotations into canonical clips");
    auto* generate = app.add_subcommand("generate", "run the LLM generation batch");
    auto* validate = app.add_subcommand("validate", "validate generated QA against timelines");
    auto* split = app.add_subcommand("split", "grouped train/test split");
    auto* mix = app.add_subcommand("mix", "build the curriculum training mix");
    auto* eval = app.add_subcommand("eval", "score candidates against references");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        forge::PipelineConfig cfg = forge::load_pipeline_config(config_path);
        if (strict_flag) cfg.strict = true;
        if (with_metadata_flag) cfg.with_metadata = true;
        if (seed_override) {
            cfg.split_seed = *seed_override;
            cfg.mix_seed = *seed_override;
        }

        if (ingest->parsed()) return cmd_ingest(cfg);
        if (generate->parsed()) return cmd_generate(cfg);
        if (validate->parsed()) return cmd_validate(cfg);
        if (split->parsed()) return cmd_split(cfg);
        if (mix->parsed()) return cmd_mix(cfg);
        if (eval->parsed()) return cmd_eval(cfg);
        return 1;
    } catch (const forge::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const forge::NetworkError& e) {
        std::cerr << "network error: " << e.what() << "\n";
        return 3;
    } catch (const forge::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const forge::ValidationError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
