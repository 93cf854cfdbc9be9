#include <doctest.h>

#include <cmath>

#include "datadesc/error.hpp"
#include "datadesc/retrieval.hpp"
#include "datadesc/util.hpp"
#include "test_support.hpp"

using namespace datadesc;

namespace {

std::map<std::string, std::string> weather_docs() {
    return {{"d1", "Wind speed"}, {"d2", "rain, fall"}, {"d3", "wind WIND rain"}, {"d4", "snow"}, {"d5", "sun"}};
}

RankedList ranked(std::vector<std::string> ids) {
    RankedList list;
    for (auto& id : ids) list.ranking.push_back({std::move(id), 0});
    return list;
}

void write(const std::filesystem::path& path, const std::string& text) { write_file_atomic(path, text); }

}  // namespace

TEST_CASE("tokenizer lowercases and splits on non-alphanumerics") {
    CHECK(tokenize("Wind-Speed, 10m/s!") == std::vector<std::string>{"wind", "speed", "10m", "s"});
    CHECK(tokenize("  ").empty());
}

TEST_CASE("bm25 scores match hand-computed values") {
    const auto index = build_index(weather_docs());
    CHECK(index.doc_count() == 5);
    CHECK(index.average_doc_length() == doctest::Approx(1.8));
    CHECK(index.document_frequency("wind") == 2);
    CHECK(index.idf("wind") == doctest::Approx(std::log(3.5 / 2.5)));
    const auto list = score("wind", index, "q");
    REQUIRE(list.ranking.size() == 5);
    CHECK(list.ranking[0].dataset_id == "d3");
    CHECK(list.ranking[0].score == doctest::Approx(0.3958496901426034).epsilon(1e-12));
    CHECK(list.ranking[1].dataset_id == "d1");
    CHECK(list.ranking[1].score == doctest::Approx(0.3204497491630599).epsilon(1e-12));
    // Zero-score tail in id order.
    CHECK(list.ranking[2].dataset_id == "d2");
    CHECK(list.ranking[4].dataset_id == "d5");
    CHECK(score("wind", index, "q", {1}).ranking.size() == 3);
}

TEST_CASE("negative idf is floored at epsilon times the mean positive idf") {
    const auto index = build_index({{"a", "x y"}, {"b", "x"}, {"c", "x z"}});
    CHECK(index.raw_idf("x") < 0);
    const double positive_mean = (index.raw_idf("y") + index.raw_idf("z")) / 2;
    CHECK(index.idf("x") == doctest::Approx(0.25 * positive_mean));
    CHECK(index.idf("unknown") == 0);
}

TEST_CASE("ties are broken by dataset id") {
    const auto index = build_index({{"b", "same text"}, {"a", "same text"}, {"c", "other"}});
    const auto list = score("same", index);
    CHECK(list.ranking[0].dataset_id == "a");
    CHECK(list.ranking[1].dataset_id == "b");
}

TEST_CASE("empty corpus and empty documents") {
    CHECK_THROWS_AS(build_index({}), EmptyCorpusError);
    const auto index = build_index({{"a", ""}, {"b", ""}});
    CHECK(index.average_doc_length() == 0);
    for (const auto& e : score("x", index).ranking) CHECK(e.score == 0);
}

TEST_CASE("index json round-trip preserves scores") {
    const auto index = build_index(weather_docs(), {1.2, 0.5, 0.3});
    const auto restored = index_from_json(index_to_json(index));
    CHECK(restored.params().k1 == 1.2);
    const auto a = score("wind rain", index);
    const auto b = score("wind rain", restored);
    REQUIRE(a.ranking.size() == b.ranking.size());
    for (std::size_t i = 0; i < a.ranking.size(); ++i) {
        CHECK(a.ranking[i].dataset_id == b.ranking[i].dataset_id);
        CHECK(a.ranking[i].score == b.ranking[i].score);
    }
}

TEST_CASE("ndcg worked examples") {
    const Judgments grades{{"a", 3}, {"b", 2}, {"c", 0}};
    CHECK(ndcg_at_k(ranked({"a", "b", "c"}), grades, 3) == 1.0);
    const double dcg = 3.0 / std::log2(2) + 0 / std::log2(3) + 7.0 / std::log2(4);
    const double idcg = 7.0 / std::log2(2) + 3.0 / std::log2(3);
    CHECK(ndcg_at_k(ranked({"b", "x", "a"}), grades, 3) == doctest::Approx(dcg / idcg).epsilon(1e-12));
    const double linear = (2.0 + 3.0 / 2.0) / (3.0 + 2.0 / std::log2(3));
    CHECK(ndcg_at_k(ranked({"b", "x", "a"}), grades, 3, Gain::Linear) == doctest::Approx(linear).epsilon(1e-12));
    CHECK(ndcg_at_k(ranked({"c", "b"}), {{"c", 0}}, 5) == 0);
    CHECK(ndcg_at_k(ranked({}), grades, 5) == 0);
    CHECK_THROWS_AS(ndcg_at_k(ranked({"a"}), grades, 0), ContractViolation);
}

TEST_CASE("toy benchmark loads and scores perfectly with its own descriptions") {
    const auto bundle = load_benchmark(testing::fixtures() / "benchmark" / "toy");
    CHECK(bundle.queries.size() == 4);
    CHECK(bundle.corpus_ids.size() == 5);
    std::map<std::string, std::string> descriptions;
    for (const auto& entry : bundle.manifest) descriptions[entry.dataset_id] = entry.description.value_or("");
    EvaluationOptions options;
    options.workers = 4;
    const auto result = evaluate(bundle, descriptions, "original", options);
    REQUIRE(result.mean_ndcg.size() == 4);
    for (double v : result.mean_ndcg) CHECK(v == doctest::Approx(1.0));
    const auto csv = evaluation_to_csv({result});
    CHECK(csv.rfind("method,k,mean_ndcg\noriginal,5,1.000000\n", 0) == 0);

    const auto stats = benchmark_stats(bundle);
    CHECK(stats.query_count == 4);
    CHECK(stats.table_count == 5);
    CHECK(stats.relevant_tables_per_query.min == 1);
    CHECK(stats.judged_tables_per_query.max == 2);
}

TEST_CASE("missing descriptions are indexed as empty text with a warning") {
    const auto bundle = load_benchmark(testing::fixtures() / "benchmark" / "toy");
    const auto result = evaluate(bundle, {{"t_wind", "wind gust"}}, "partial");
    CHECK(result.warnings.size() >= 1);
    CHECK(result.per_query[0][0] == doctest::Approx(1.0));
}

TEST_CASE("benchmark validation lists dangling and negative judgments") {
    testing::ScratchDir dir("datadesc-bench");
    write(dir.path() / "manifest.jsonl", "{\"dataset_id\": \"a\", \"title\": \"A\", \"description\": \"x\"}\n");
    write(dir.path() / "queries.tsv", "q1\tfoo\n");
    write(dir.path() / "qrels.tsv", "q1\tghost\t1\nq9\ta\t1\nq1\ta\t-1\n");
    try {
        load_benchmark(dir.path());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("ghost") != std::string::npos);
        CHECK(what.find("q9") != std::string::npos);
        CHECK(what.find("-1") != std::string::npos);
    }
}
