#include <catch2/catch_amalgamated.hpp>

#include "forge/validate.hpp"

using namespace forge;

namespace {

Timeline table1_counting_timeline() {
    ClipAnnotation clip{"c1",
                        AnnotationSource::strong_tsv,
                        {{"Pig", 0, 1},
                         {"Mechanisms", 1.5, 2.5},
                         {"Pig", 3, 4},
                         {"Mechanisms", 4.5, 5.5},
                         {"Sound effect", 6, 7},
                         {"Pig", 7.5, 8.5}}};
    return build_timeline(clip);
}

QARecord draft(std::string question, std::string answer, std::string clip_id = "c1") {
    QARecord r;
    r.record_id = "q001";
    r.clip_id = std::move(clip_id);
    r.question = std::move(question);
    r.answer = std::move(answer);
    return r;
}

} // namespace

TEST_CASE("classify_category follows the cue cascade") {
    CHECK(classify_category("How many times does the Pig oink?") == Category::counting);
    CHECK(classify_category("What's the sequence of the audio events in the clip?") ==
          Category::chronological);
    CHECK(classify_category("What ambient sound persists throughout the audio clip?") ==
          Category::duration_background);
    CHECK(classify_category("Is the door bell sound after the dog barking?") ==
          Category::before_after);
    CHECK(classify_category("Which sound recurs after each instance of breathing?") ==
          Category::before_after); // "after" outranks "recurs" in the cascade
    CHECK(classify_category("Does a dog recur in a pattern?") == Category::pattern);
    CHECK(classify_category("What color is the sky?") == Category::other);
}

TEST_CASE("counting answer matching the oracle is accepted") {
    auto t = table1_counting_timeline();
    auto r = validate_qa(draft("How many times does the Pig oink?",
                               "The Pig oink is heard 3 times with mechanisms sound "
                               "occurring in between."),
                         t);
    CHECK(r.category == Category::counting);
    CHECK(r.verdict == Verdict::accepted);
}

TEST_CASE("counting contradiction is rejected with the expected count") {
    auto t = table1_counting_timeline();
    auto r = validate_qa(draft("How many times does the Pig oink?",
                               "The Pig oink is heard 4 times."),
                         t);
    CHECK(r.verdict == Verdict::rejected);
    CHECK(r.reason.rfind("count_mismatch: expected 3", 0) == 0);
}

TEST_CASE("spelled-out counts are extracted") {
    auto t = table1_counting_timeline();
    auto ok = validate_qa(draft("How many times does the Pig oink?",
                                "The pig is heard three times."),
                          t);
    CHECK(ok.verdict == Verdict::accepted);
    auto bad = validate_qa(draft("How many times does the Pig oink?",
                                 "The pig is heard seven times."),
                           t);
    CHECK(bad.verdict == Verdict::rejected);
}

TEST_CASE("chronological order consistent with the oracle is accepted") {
    auto t = table1_counting_timeline();
    auto r = validate_qa(draft("What's the sequence of the audio events in the clip?",
                               "First Pig, then Mechanisms, then Sound effect."),
                         t);
    CHECK(r.verdict == Verdict::accepted);
}

TEST_CASE("impossible mention order is rejected") {
    auto t = table1_counting_timeline();
    // Mechanisms never occurs after the Sound effect on this timeline
    auto bad = validate_qa(draft("What's the sequence of the audio events in the clip?",
                                 "The Sound effect is heard, then the Mechanisms."),
                           t);
    CHECK(bad.verdict == Verdict::rejected);
    CHECK(bad.reason == "order_mismatch");
}

TEST_CASE("before/after contradiction detected via precedes") {
    auto t = table1_counting_timeline();
    auto ok = validate_qa(draft("Is the Sound effect heard after the Pig?",
                                "Yes, the Sound effect comes after the Pig."),
                          t);
    CHECK(ok.verdict == Verdict::accepted);
    auto bad = validate_qa(draft("Is the Sound effect heard after the Pig?",
                                 "No, the Sound effect comes before the Pig."),
                           t);
    CHECK(bad.verdict == Verdict::rejected);
    CHECK(bad.reason == "order_contradiction");
}

TEST_CASE("background answers must name a background sound") {
    ClipAnnotation clip{"c2",
                        AnnotationSource::strong_tsv,
                        {{"Music", 0, 10}, {"Speech", 1, 2}}};
    auto t = build_timeline(clip);
    auto ok = validate_qa(draft("What ambient sound persists throughout the clip?",
                                "The Music persists throughout the audio.", "c2"),
                          t);
    CHECK(ok.verdict == Verdict::accepted);
    auto bad = validate_qa(draft("What ambient sound persists throughout the clip?",
                                 "The Speech persists throughout the audio.", "c2"),
                           t);
    CHECK(bad.verdict == Verdict::rejected);
    CHECK(bad.reason == "background_mismatch");
}

TEST_CASE("pattern claims are checked against recurrence_pattern") {
    ClipAnnotation clip{"c3",
                        AnnotationSource::strong_tsv,
                        {{"Child singing", 0, 1},
                         {"Breathing", 1.5, 2.5},
                         {"Child singing", 3, 4},
                         {"Breathing", 4.5, 5.5},
                         {"Child singing", 6, 7},
                         {"Cough", 7.5, 8.5}}};
    auto t = build_timeline(clip);
    auto ok = validate_qa(
        draft("Which sound recurs in a pattern here?",
              "The Child singing recurs after each instance of Breathing.", "c3"),
        t);
    CHECK(ok.verdict == Verdict::accepted);
    auto bad = validate_qa(
        draft("Which sound recurs in a pattern here?",
              "The Breathing recurs after each instance of Child singing.", "c3"),
        t);
    CHECK(bad.verdict == Verdict::rejected);
    CHECK(bad.reason == "pattern_mismatch");
}

TEST_CASE("free-form answers with no extractable claim are unverifiable") {
    auto t = table1_counting_timeline();
    auto r = validate_qa(draft("How many times does the Pig oink?",
                               "Quite often, in a lively rhythm."),
                         t);
    CHECK(r.verdict == Verdict::unverifiable);
}

TEST_CASE("clip mismatch is an error") {
    auto t = table1_counting_timeline();
    REQUIRE_THROWS_AS(validate_qa(draft("How many?", "3", "other_clip"), t),
                      ValidationError);
}

TEST_CASE("dedupe keeps first per normalized question within a clip") {
    std::vector<QARecord> records{
        draft("How many times does the Pig oink?", "3"),
        draft("How many times does the pig oink", "3"), // differs by case and '?'
        draft("How many times does the Pig oink?", "3", "c2"),
        draft("Something else?", "x"),
    };
    auto out = dedupe(records);
    REQUIRE(out.size() == 3);
    CHECK(out[0].clip_id == "c1");
    CHECK(out[1].clip_id == "c2");
    CHECK(out[2].question == "Something else?");
    CHECK(dedupe(out).size() == out.size()); // idempotent
}

TEST_CASE("validate_batch rejects duplicates and orders output") {
    auto t = table1_counting_timeline();
    std::map<std::string, Timeline> timelines{{"c1", t}};
    std::vector<QARecord> drafts{
        draft("How many times does the Pig oink?", "The pig is heard 3 times."),
        draft("How many times does the Pig oink?", "The pig is heard 3 times."),
    };
    drafts[1].record_id = "q002";
    auto out = validate_batch(drafts, timelines);
    REQUIRE(out.size() == 2);
    CHECK(out[0].verdict == Verdict::accepted);
    CHECK(out[1].verdict == Verdict::rejected);
    CHECK(out[1].reason == "duplicate");
}

TEST_CASE("QA record JSON round-trip") {
    auto r = draft("Q?", "A.");
    r.category = Category::counting;
    r.verdict = Verdict::rejected;
    r.reason = "count_mismatch: expected 3, answer says 4";
    auto back = qa_record_from_json(qa_record_to_json(r));
    CHECK(back.record_id == r.record_id);
    CHECK(back.category == r.category);
    CHECK(back.verdict == r.verdict);
    CHECK(back.reason == r.reason);
}
