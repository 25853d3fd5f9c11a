#include <catch2/catch_amalgamated.hpp>

#include "forge/assembly.hpp"
#include "forge/metrics.hpp"
#include "support/oracles.hpp"

using namespace forge;

namespace {

// fixed toy corpus used by the oracle comparison and the eval CLI fixture
std::vector<ScoredItem> toy_corpus() {
    return {
        {"i1",
         "a dog barks in the park",
         {"a dog is barking in the park", "a dog barks outside"}},
        {"i2",
         "rain falls on the roof",
         {"heavy rain falls on a tin roof", "rain is falling on the roof"}},
        {"i3",
         "a man speaks and a door slams",
         {"a man is speaking before a door slams", "someone talks then a door closes"}},
    };
}

std::vector<oracles::CorpusItem> to_oracle(const std::vector<ScoredItem>& items) {
    std::vector<oracles::CorpusItem> out;
    for (const auto& item : items) {
        oracles::CorpusItem o;
        o.id = item.item_id;
        o.candidate_tokens = tokenize(item.candidate);
        for (const auto& r : item.references) o.reference_tokens.push_back(tokenize(r));
        out.push_back(std::move(o));
    }
    return out;
}

} // namespace

TEST_CASE("tokenize lowercases, strips punctuation, splits on whitespace") {
    CHECK(tokenize("A Dog barks!") == std::vector<std::string>{"a", "dog", "barks"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("rock-and-roll") == std::vector<std::string>{"rock", "and", "roll"});
    CHECK(tokenize("  many   spaces\t\nhere ") ==
          std::vector<std::string>{"many", "spaces", "here"});
    for (const auto& tok : tokenize("It's (quite) [a] \"mess\"; really?!"))
        for (char c : tok) {
            CHECK_FALSE(text::is_punct_token_char(c));
            CHECK_FALSE(std::isupper(static_cast<unsigned char>(c)));
        }
}

TEST_CASE("cider_d matches the brute-force oracle on the toy corpus") {
    auto items = toy_corpus();
    auto scored = cider_d(items);
    auto expected = oracles::cider_d(to_oracle(items));
    REQUIRE(scored.per_item.size() == expected.size());
    for (const auto& [id, score] : expected)
        CHECK_THAT(scored.per_item.at(id), Catch::Matchers::WithinAbs(score, 1e-9));
}

TEST_CASE("candidate sharing no n-gram with its references scores zero") {
    auto items = toy_corpus();
    items[0].candidate = "zzz qqq www";
    auto scored = cider_d(items);
    CHECK(scored.per_item.at("i1") == 0.0);
}

TEST_CASE("duplicating every reference leaves per-item scores unchanged") {
    auto items = toy_corpus();
    auto base = cider_d(items);
    auto doubled = items;
    for (auto& item : doubled) {
        auto refs = item.references;
        item.references.insert(item.references.end(), refs.begin(), refs.end());
    }
    auto scored = cider_d(doubled);
    for (const auto& [id, score] : base.per_item)
        CHECK_THAT(scored.per_item.at(id), Catch::Matchers::WithinAbs(score, 1e-9));
}

TEST_CASE("identity candidate scores highest and corruption strictly lowers it") {
    auto items = toy_corpus();
    items[0].candidate = items[0].references[0];
    items[0].references = {items[0].references[0]};
    auto base = cider_d(items);
    auto oracle = oracles::cider_d(to_oracle(items));
    CHECK_THAT(base.per_item.at("i1"),
               Catch::Matchers::WithinAbs(oracle.at("i1"), 1e-9));

    auto corrupted = items;
    corrupted[0].candidate = "a dog is barking in the zoo";
    auto lower = cider_d(corrupted);
    CHECK(lower.per_item.at("i1") < base.per_item.at("i1"));
}

TEST_CASE("per-item scores stay within [0, scale] and ignore corpus order") {
    auto items = toy_corpus();
    auto base = cider_d(items);
    for (const auto& [id, score] : base.per_item) {
        CHECK(score >= 0.0);
        CHECK(score <= 10.0);
    }
    std::swap(items[0], items[2]);
    auto shuffled = cider_d(items);
    for (const auto& [id, score] : base.per_item)
        CHECK_THAT(shuffled.per_item.at(id), Catch::Matchers::WithinAbs(score, 1e-12));
}

TEST_CASE("single-item corpus is an error") {
    REQUIRE_THROWS_AS(cider_d({{"i1", "a", {"a"}}}), ValidationError);
}

TEST_CASE("spider averages cider and spice") {
    std::map<std::string, double> cider{{"a", 0.4}, {"b", 0.0}};
    std::map<std::string, double> spice{{"a", 0.2}, {"b", 0.0}};
    auto report = spider(cider, &spice);
    CHECK_FALSE(report.spider_unavailable);
    CHECK_THAT(report.per_item.at("a"), Catch::Matchers::WithinAbs(0.3, 1e-12));
    CHECK(report.per_item.at("b") == 0.0);
}

TEST_CASE("spider without spice is flagged cider-only") {
    std::map<std::string, double> cider{{"a", 0.4}};
    auto report = spider(cider);
    CHECK(report.spider_unavailable);
    CHECK(report.per_item.at("a") == 0.4);
}

TEST_CASE("spider id mismatch lists the missing ids") {
    std::map<std::string, double> cider{{"a", 0.4}, {"b", 0.1}};
    std::map<std::string, double> spice{{"a", 0.2}};
    try {
        spider(cider, &spice);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("b") != std::string::npos);
    }
}

TEST_CASE("mcq scoring: exact option quoted is correct, ambiguity is wrong") {
    std::vector<McqItem> key{{"q1", {"dog barking", "cat meowing", "rain", "wind"}, 0}};
    CHECK(mcq_accuracy({{"q1", "The answer is dog barking."}}, key).correct == 1);
    CHECK(mcq_accuracy({{"q1", "Either dog barking or cat meowing."}}, key).correct == 0);
    CHECK(mcq_accuracy({{"q1", "cat meowing"}}, key).correct == 0);
    CHECK(mcq_accuracy({{"q1", "none of these sounds"}}, key).correct == 0);
    REQUIRE_THROWS_AS(mcq_accuracy({}, {}), ValidationError);
}

TEST_CASE("uniform-random predictions land near the 4-option chance rate") {
    SplitMix64 rng(2024);
    std::vector<McqItem> key;
    std::map<std::string, std::string> predictions;
    for (int i = 0; i < 1000; ++i) {
        std::string id = "q" + std::to_string(i);
        std::vector<std::string> options;
        for (int o = 0; o < 4; ++o)
            options.push_back("option" + std::to_string(i) + "x" + std::to_string(o));
        key.push_back({id, options, static_cast<int>(rng.next_below(4))});
        predictions[id] = "I think it is " + options[rng.next_below(4)] + ".";
    }
    auto result = mcq_accuracy(predictions, key);
    CHECK(result.accuracy_percent > 26.72 - 4.0);
    CHECK(result.accuracy_percent < 26.72 + 4.0);
}
