#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "forge/assembly.hpp"

using namespace forge;

namespace {

std::vector<QARecord> make_records(int n_clips, int per_clip) {
    std::vector<QARecord> records;
    for (int c = 0; c < n_clips; ++c)
        for (int q = 0; q < per_clip; ++q) {
            QARecord r;
            r.clip_id = "clip" + std::to_string(c);
            r.record_id = "q" + std::to_string(q);
            r.question = "Q";
            r.answer = "A";
            r.verdict = Verdict::accepted;
            records.push_back(std::move(r));
        }
    return records;
}

std::vector<TrainingExample> make_pool(const std::map<TaskTag, int>& sizes) {
    std::vector<TrainingExample> pool;
    for (const auto& [tag, n] : sizes)
        for (int i = 0; i < n; ++i) {
            TrainingExample ex;
            ex.audio_id = to_string(tag) + std::to_string(i);
            ex.instruction = "I";
            ex.output = "O";
            ex.task_tag = tag;
            pool.push_back(std::move(ex));
        }
    return pool;
}

std::vector<TrainingExample> make_temporal(int n) {
    std::vector<TrainingExample> out;
    for (int i = 0; i < n; ++i) {
        TrainingExample ex;
        ex.audio_id = "t" + std::to_string(i);
        ex.instruction = "Q";
        ex.metadata_input = "M";
        ex.output = "A";
        ex.task_tag = TaskTag::temporal;
        out.push_back(std::move(ex));
    }
    return out;
}

std::multiset<std::string> ids(const std::vector<TrainingExample>& v) {
    std::multiset<std::string> out;
    for (const auto& ex : v) out.insert(ex.audio_id);
    return out;
}

} // namespace

TEST_CASE("splitmix64 produces the published reference stream") {
    // first three outputs for seed 1234567, from the reference implementation
    SplitMix64 rng(1234567);
    CHECK(rng.next() == 6457827717110365317ull);
    CHECK(rng.next() == 3203168211198807973ull);
    CHECK(rng.next() == 9817491932198370423ull);
}

TEST_CASE("80:20 split of 10 clips gives 8 train and 2 test clips") {
    auto split = split_dataset(make_records(10, 3), 0.8, 99);
    CHECK(split.train_clips.size() == 8);
    CHECK(split.test_clips.size() == 2);
    CHECK(split.train.size() == 24);
    CHECK(split.test.size() == 6);
}

TEST_CASE("split is deterministic for a fixed seed") {
    auto records = make_records(12, 2);
    auto a = split_dataset(records, 0.8, 7);
    auto b = split_dataset(records, 0.8, 7);
    CHECK(a.train_clips == b.train_clips);
    CHECK(a.test_clips == b.test_clips);
}

TEST_CASE("no clip leaks across the split, any seed") {
    auto records = make_records(17, 2);
    for (uint64_t seed = 0; seed < 100; ++seed) {
        auto split = split_dataset(records, 0.8, seed);
        std::set<std::string> train(split.train_clips.begin(), split.train_clips.end());
        for (const auto& c : split.test_clips) CHECK_FALSE(train.contains(c));
        CHECK(split.train_clips.size() + split.test_clips.size() == 17);
        for (const auto& r : split.train) CHECK(r.split == "train");
        for (const auto& r : split.test) CHECK(r.split == "test");
    }
}

TEST_CASE("split rejects degenerate inputs") {
    REQUIRE_THROWS_AS(split_dataset(make_records(1, 5), 0.8, 1), ValidationError);
    REQUIRE_THROWS_AS(split_dataset(make_records(10, 1), 0.0, 1), ConfigError);
    REQUIRE_THROWS_AS(split_dataset(make_records(10, 1), 1.0, 1), ConfigError);
}

TEST_CASE("ratio 0.5 doubles the temporal set") {
    auto temporal = make_temporal(100);
    auto pool = make_pool({{TaskTag::tagging, 60},
                           {TaskTag::classification, 60},
                           {TaskTag::captioning, 60}});
    auto mix = mix_curriculum(temporal, pool, 0.5, 1, false);
    CHECK(mix.t_core.size() == 100);
    CHECK(mix.t_total.size() == 200);
}

TEST_CASE("ratio 1.0 yields a shuffle of temporal alone") {
    auto temporal = make_temporal(20);
    auto mix = mix_curriculum(temporal, {}, 1.0, 3, false);
    CHECK(mix.t_core.empty());
    CHECK(ids(mix.t_total) == ids(temporal));
}

TEST_CASE("multiset identity holds for every seed") {
    auto temporal = make_temporal(30);
    auto pool = make_pool({{TaskTag::tagging, 40}, {TaskTag::captioning, 40}});
    for (uint64_t seed = 0; seed < 25; ++seed) {
        auto mix = mix_curriculum(temporal, pool, 0.5, seed, false);
        auto expected = ids(mix.t_temporal);
        for (const auto& ex : mix.t_core) expected.insert(ex.audio_id);
        CHECK(ids(mix.t_total) == expected);
    }
}

TEST_CASE("same seed twice gives an identical order") {
    auto temporal = make_temporal(40);
    auto pool = make_pool({{TaskTag::tagging, 50}, {TaskTag::classification, 50}});
    auto a = mix_curriculum(temporal, pool, 0.5, 17, false);
    auto b = mix_curriculum(temporal, pool, 0.5, 17, false);
    CHECK(a.t_total == b.t_total);
    auto c = mix_curriculum(temporal, pool, 0.5, 18, false);
    CHECK(a.t_total != c.t_total); // virtually certain for 80 items
}

TEST_CASE("core draw is stratified evenly across present task tags") {
    auto temporal = make_temporal(90);
    auto pool = make_pool({{TaskTag::tagging, 60},
                           {TaskTag::classification, 60},
                           {TaskTag::captioning, 60}});
    for (uint64_t seed = 0; seed < 30; ++seed) {
        auto mix = mix_curriculum(temporal, pool, 0.5, seed, false);
        std::map<TaskTag, size_t> counts;
        for (const auto& ex : mix.t_core) ++counts[ex.task_tag];
        REQUIRE(counts.size() == 3);
        for (const auto& [tag, n] : counts) CHECK(n == 30); // 90 divides evenly by 3
    }
}

TEST_CASE("insufficient core pool names required vs available") {
    auto temporal = make_temporal(100);
    auto pool = make_pool({{TaskTag::tagging, 10}});
    try {
        mix_curriculum(temporal, pool, 0.5, 1, false);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        CHECK(msg.find("need 100") != std::string::npos);
        CHECK(msg.find("have 10") != std::string::npos);
    }
}

TEST_CASE("with_metadata controls metadata_input on temporal examples") {
    QARecord r;
    r.clip_id = "c";
    r.question = "Q";
    r.answer = "A";
    r.metadata = "The audio starts with Dog.";
    auto with = training_example_from_qa(r, true);
    CHECK(with.metadata_input == r.metadata);
    auto without = training_example_from_qa(r, false);
    CHECK(without.metadata_input.empty());

    auto mix = mix_curriculum({with}, {}, 1.0, 1, false);
    for (const auto& ex : mix.t_temporal) CHECK(ex.metadata_input.empty());
}

TEST_CASE("training example JSON uses null metadata when absent") {
    TrainingExample ex;
    ex.audio_id = "a";
    ex.instruction = "Q";
    ex.output = "A";
    ex.task_tag = TaskTag::captioning;
    auto j = training_example_to_json(ex);
    CHECK(j["metadata"].is_null());
    CHECK(training_example_from_json(j) == ex);
}
