#include <doctest.h>

#include <set>

#include "datadesc/csv.hpp"
#include "datadesc/dataset.hpp"
#include "datadesc/error.hpp"
#include "test_support.hpp"

using namespace datadesc;

TEST_CASE("csv parser handles quotes, escapes and line endings") {
    const auto records = csv::parse("a,b,c\r\n\"x,1\",\"say \"\"hi\"\"\",\"two\nlines\"\n1,,3\n");
    REQUIRE(records.size() == 3);
    CHECK(records[0] == csv::Record{"a", "b", "c"});
    CHECK(records[1] == csv::Record{"x,1", "say \"hi\"", "two\nlines"});
    CHECK(records[2] == csv::Record{"1", "", "3"});
}

TEST_CASE("csv field escaping round-trips") {
    CHECK(csv::escape_field("plain") == "plain");
    CHECK(csv::escape_field("a,b") == "\"a,b\"");
    CHECK(csv::escape_field("q\"") == "\"q\"\"\"");
    const csv::Record record{"a,b", "c\"d", "e\nf", "g"};
    const auto parsed = csv::parse(csv::format_record(record) + "\n");
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0] == record);
}

TEST_CASE("invalid utf-8 becomes the replacement character") {
    const std::string bad = std::string("ok") + '\xff' + "x";
    CHECK(csv::sanitize_utf8(bad) == "ok\xEF\xBF\xBDx");
    CHECK(csv::sanitize_utf8("caf\xC3\xA9") == "caf\xC3\xA9");
}

TEST_CASE("missing-value literals") {
    for (const char* cell : {"", "NA", "N/A", "null", "NULL", "-"}) CHECK(is_missing(cell));
    for (const char* cell : {"0", "na ", "none", "x"}) CHECK_FALSE(is_missing(cell));
}

TEST_CASE("short rows are padded with a warning") {
    const auto table = ingest_csv_text("a,b,c\n1,2\n4,5,6\n", "t", "T");
    CHECK(table.row_count() == 2);
    CHECK(table.column_count() == 3);
    CHECK(table.cells[0] == std::vector<std::string>{"1", "2", ""});
    CHECK(table.ingest_warnings.size() == 1);
}

TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(ingest_csv_text("", "t", "T"), MalformedInputError);
}

TEST_CASE("missing file raises IoError") {
    CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv", "t", "T"), IoError);
}

TEST_CASE("row sampling is seeded and without replacement") {
    std::string text = "n\n";
    for (int i = 0; i < 50; ++i) text += std::to_string(i) + "\n";
    const auto table = ingest_csv_text(text, "t", "T");

    const auto a = sample_rows(table, 5, 42);
    const auto b = sample_rows(table, 5, 42);
    CHECK(a.row_indices == b.row_indices);
    CHECK(std::set<std::size_t>(a.row_indices.begin(), a.row_indices.end()).size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(a.rows[i] == table.cells[a.row_indices[i]]);

    const auto c = sample_rows(table, 5, 43);
    CHECK(c.row_indices != a.row_indices);

    const auto all = sample_rows(table, 500, 1);
    REQUIRE(all.row_indices.size() == 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK(all.row_indices[i] == i);
}

TEST_CASE("column value sampling returns distinct non-missing values") {
    const auto table = ingest_csv_text("v\na\na\nNA\nb\n\nc\nc\n", "t", "T");
    const auto values = sample_column_values(table, 0, 10, 3);
    CHECK(std::set<std::string>(values.begin(), values.end()) == std::set<std::string>{"a", "b", "c"});
    CHECK(values.size() == 3);
    CHECK(sample_column_values(table, 0, 2, 3).size() == 2);
}

TEST_CASE("seeded rng bounded draws stay in range") {
    SeededRng rng(9);
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
    SeededRng x(5), y(5);
    for (int i = 0; i < 20; ++i) CHECK(x.below(1000) == y.below(1000));
}

TEST_CASE("manifest entries resolve relative to the manifest") {
    const auto entries = read_manifest(testing::fixtures() / "corpus" / "manifest.jsonl");
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].dataset_id == "health_insurance");
    CHECK(entries[0].csv_path == testing::fixtures() / "corpus" / "health_insurance.csv");
    const auto table = ingest_entry(entries[1]);
    CHECK(table.row_count() == 4433);
    CHECK(table.column_count() == 4);
    CHECK(table.title == "Wind Measurements 2003");
}
