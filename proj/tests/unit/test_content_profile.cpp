#include <doctest.h>

#include "datadesc/content_profile.hpp"
#include "datadesc/util.hpp"
#include "test_support.hpp"

using namespace datadesc;

namespace {

ColumnStats profile_of(std::vector<std::string_view> values) { return profile_column_values("c", values); }

}  // namespace

TEST_CASE("scalar parsers") {
    CHECK(parse_integer("42") == 42);
    CHECK(parse_integer("-7") == -7);
    CHECK_FALSE(parse_integer("4.0"));
    CHECK_FALSE(parse_integer("abc"));
    CHECK(parse_float("2.5") == 2.5);
    CHECK(parse_float("1e3") == 1000.0);
    CHECK_FALSE(parse_float("12"));
    CHECK(parse_boolean("TRUE") == true);
    CHECK(parse_boolean("no") == false);
    CHECK_FALSE(parse_boolean("maybe"));
}

TEST_CASE("datetime formats and resolutions") {
    const auto year = parse_datetime("2013");
    REQUIRE(year);
    CHECK(year->resolution == TemporalResolution::Year);
    CHECK(format_timestamp(*year) == "2013");
    CHECK_FALSE(parse_datetime("1700"));
    CHECK_FALSE(parse_datetime("3000"));

    const auto day = parse_datetime("2021-03-04");
    REQUIRE(day);
    CHECK(format_timestamp(*day) == "2021-03-04");

    const auto minute = parse_datetime("2003-05-13 00:10");
    REQUIRE(minute);
    CHECK(format_timestamp(*minute) == "2003-05-13 00:10");
    CHECK(minute->seconds - parse_datetime("2003-05-13 00:00")->seconds == 600);

    const auto us = parse_datetime("03/04/2021");
    REQUIRE(us);
    CHECK(us->seconds == day->seconds);
    CHECK_FALSE(parse_datetime("2021-13-01"));
}

TEST_CASE("numeric extremes keep their notation") {
    CHECK(format_numeric({27, true}) == "27.0");
    CHECK(format_numeric({0, false}) == "0");
    CHECK(format_numeric({2682301090, false}) == "2682301090");
    CHECK(format_numeric({2.78L, true}) == "2.78");
}

TEST_CASE("type inference thresholds") {
    SUBCASE("integers") {
        const auto s = profile_of({"1", "2", "3", "", "NA"});
        CHECK(s.inferred_types == std::set<DataType>{DataType::Integer});
        CHECK(s.missing_count == 2);
        CHECK(s.unique_count == 3);
        CHECK(format_numeric(*s.numeric_max) == "3");
    }
    SUBCASE("floats with some integer cells") {
        const auto s = profile_of({"0", "1.5", "2.25", "0"});
        CHECK(s.inferred_types == std::set<DataType>{DataType::Float});
        CHECK(format_numeric(*s.numeric_min) == "0");
        CHECK(format_numeric(*s.numeric_max) == "2.25");
    }
    SUBCASE("text below the threshold") {
        const auto s = profile_of({"1", "2", "x", "y"});
        CHECK(s.inferred_types == std::set<DataType>{DataType::Text});
        CHECK_FALSE(s.numeric_min);
    }
    SUBCASE("years are text and datetime") {
        const auto s = profile_of({"2013", "2020", "2015"});
        CHECK(s.inferred_types == std::set<DataType>{DataType::Text, DataType::DateTime});
        CHECK(format_timestamp(*s.temporal_min) == "2013");
        CHECK(format_timestamp(*s.temporal_max) == "2020");
    }
    SUBCASE("booleans") {
        const auto s = profile_of({"true", "false", "TRUE"});
        CHECK(s.inferred_types.count(DataType::Boolean) == 1);
    }
    SUBCASE("all missing") {
        const auto s = profile_of({"", "NA"});
        CHECK(s.unique_count == 0);
        CHECK(s.missing_count == 2);
    }
}

TEST_CASE("health fixture matches the golden summary") {
    const auto table =
        ingest_csv(testing::fixtures() / "corpus" / "health_insurance.csv", "health_insurance", "Health");
    const auto profile = profile_table(table);
    CHECK(profile.row_count == 790);
    CHECK(profile.column_count == 6);
    CHECK(render_content_summary(profile) ==
          read_file(testing::fixtures() / "golden" / "health_insurance_summary.txt"));
}

TEST_CASE("wind fixture matches the golden summary") {
    const auto table =
        ingest_csv(testing::fixtures() / "corpus" / "wind_measurements.csv", "wind_measurements", "Wind");
    CHECK(render_content_summary(profile_table(table)) ==
          read_file(testing::fixtures() / "golden" / "wind_measurements_summary.txt"));
}

TEST_CASE("profile does not depend on worker count and round-trips through json") {
    const auto table =
        ingest_csv(testing::fixtures() / "corpus" / "regional_climate.csv", "regional_climate", "Climate");
    const auto one = profile_table(table, 1);
    const auto many = profile_table(table, 8);
    CHECK(one == many);
    const nlohmann::json j = one;
    CHECK(j.get<ContentProfile>() == one);
}

TEST_CASE("coverage line omitted for plain text columns") {
    const auto table = ingest_csv_text("name\nalpha\nbeta\n", "t", "T");
    const auto summary = render_content_summary(profile_table(table));
    CHECK(summary.find("Coverage") == std::string::npos);
    CHECK(summary.find("    - Data Types: Text\n") != std::string::npos);
}
