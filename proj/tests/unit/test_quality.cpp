#include <doctest.h>

#include <string>
#include <utility>
#include <vector>

#include "datadesc/quality.hpp"
#include "datadesc/stemmer.hpp"

using namespace datadesc;

TEST_CASE("porter stemmer reference pairs") {
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"caresses", "caress"},     {"ponies", "poni"},          {"ties", "ti"},
        {"caress", "caress"},       {"cats", "cat"},             {"feed", "feed"},
        {"agreed", "agre"},         {"plastered", "plaster"},    {"motoring", "motor"},
        {"sing", "sing"},           {"conflated", "conflat"},    {"troubled", "troubl"},
        {"sized", "size"},          {"hopping", "hop"},          {"falling", "fall"},
        {"filing", "file"},         {"happy", "happi"},          {"relational", "relat"},
        {"conditional", "condit"},  {"rational", "ration"},      {"valenci", "valenc"},
        {"digitizer", "digit"},     {"operator", "oper"},        {"feudalism", "feudal"},
        {"decisiveness", "decis"},  {"hopefulness", "hope"},     {"formaliti", "formal"},
        {"triplicate", "triplic"},  {"formative", "form"},       {"electrical", "electr"},
        {"revival", "reviv"},       {"allowance", "allow"},      {"adjustable", "adjust"},
        {"adoption", "adopt"},      {"controll", "control"},     {"roll", "roll"},
        {"generalizations", "gener"}, {"oscillators", "oscil"},  {"measurements", "measur"},
        {"is", "is"},               {"a", "a"},                  {"10m", "10m"}};
    for (const auto& [word, stem] : pairs) {
        CAPTURE(word);
        CHECK(porter_stem(word) == stem);
    }
}

TEST_CASE("rouge on small pairs") {
    const auto r = rouge("a b", "a b c");
    CHECK(r.rouge_1_f == doctest::Approx(0.8));
    CHECK(r.rouge_2_f == doctest::Approx(2.0 / 3.0));
    CHECK(r.rouge_l_f == doctest::Approx(0.8));
    const auto same = rouge("The wind blew", "the wind blew");
    CHECK(same.rouge_1_f == 1.0);
    CHECK(same.rouge_2_f == 1.0);
    CHECK(same.rouge_l_f == 1.0);
    const auto none = rouge("alpha beta", "gamma delta");
    CHECK(none.rouge_1_f == 0);
    CHECK(none.rouge_l_f == 0);
    CHECK(rouge("", "a").rouge_1_f == 0);
}

TEST_CASE("rouge clips repeated n-grams") {
    // Candidate repeats "a" three times; reference has it once.
    const auto r = rouge("a a a", "a b");
    const double p = 1.0 / 3.0, rc = 0.5;
    CHECK(r.rouge_1_f == doctest::Approx(2 * p * rc / (p + rc)));
}

TEST_CASE("rouge-l uses the longest common subsequence") {
    const auto r = rouge("a x b y c", "a b c");
    CHECK(r.rouge_l_f == doctest::Approx(2 * (3.0 / 5) * 1.0 / (3.0 / 5 + 1.0)));
}

TEST_CASE("meteor worked example") {
    const auto a = meteor_alignment("the cat sat", "the cat sat on the mat");
    CHECK(a.matches == 3);
    CHECK(a.chunks == 1);
    CHECK(a.precision == 1.0);
    CHECK(a.recall == 0.5);
    CHECK(a.fmean == doctest::Approx(5.0 / 9.5));
    CHECK(a.score == doctest::Approx(5.0 / 9.5 * (1 - 0.5 / 27)));
}

TEST_CASE("meteor stem stage and chunk counting") {
    const auto a = meteor_alignment("measurements of winds", "wind measurement");
    CHECK(a.exact_matches == 0);
    CHECK(a.stem_matches == 2);
    CHECK(a.chunks == 2);
    const auto b = meteor_alignment("b a", "a b");
    CHECK(b.chunks == 2);
    CHECK(b.penalty == doctest::Approx(0.5));
}

TEST_CASE("meteor extremes") {
    const std::string text = "hourly wind speed and direction measurements from a coastal mast";
    CHECK(meteor(text, text) > 0.9);
    CHECK(meteor("alpha beta", "gamma delta") == 0);
    CHECK(meteor("", "x") == 0);
    const auto all = reference_scores(text, text);
    CHECK(all.rouge_1_f == 1.0);
    CHECK(all.meteor > 0.9);
}
