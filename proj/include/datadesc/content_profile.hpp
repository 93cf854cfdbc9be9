#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "datadesc/dataset.hpp"

namespace datadesc {

// Declaration order is the rendering order of "Data Types:".
enum class DataType { Text, Integer, Float, Boolean, DateTime };

std::string_view to_string(DataType type) noexcept;
DataType data_type_from_string(std::string_view name);

/// A parsed numeric extreme. `is_float` records whether the raw cell was
/// written in float notation, which decides how the coverage is rendered.
struct NumericValue {
    long double value = 0;
    bool is_float = false;

    friend bool operator==(const NumericValue&, const NumericValue&) = default;
};

enum class TemporalResolution { Year, Month, Day, Minute, Second };

/// A calendar timestamp in seconds since 1970-01-01T00:00:00 (proleptic
/// Gregorian, no time zone) and the resolution of the format it came from.
struct Timestamp {
    std::int64_t seconds = 0;
    TemporalResolution resolution = TemporalResolution::Second;

    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

std::optional<std::int64_t> parse_integer(std::string_view text) noexcept;
/// Decimal point and/or exponent required; plain integers do not parse.
std::optional<double> parse_float(std::string_view text) noexcept;
std::optional<bool> parse_boolean(std::string_view text) noexcept;
/// YYYY, YYYY-MM, YYYY-MM-DD, YYYY-MM-DD[ T]HH:MM[:SS], MM/DD/YYYY and
/// MM/DD/YYYY HH:MM. Bare years must lie in [1800, 2100].
std::optional<Timestamp> parse_datetime(std::string_view text) noexcept;

std::string format_timestamp(const Timestamp& ts);
std::string format_numeric(const NumericValue& value);

struct ColumnStats {
    std::string name;
    std::set<DataType> inferred_types;
    std::optional<NumericValue> numeric_min;
    std::optional<NumericValue> numeric_max;
    std::optional<Timestamp> temporal_min;
    std::optional<Timestamp> temporal_max;
    std::size_t unique_count = 0;
    std::size_t missing_count = 0;

    friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
};

struct ContentProfile {
    std::size_t row_count = 0;
    std::size_t column_count = 0;
    std::vector<ColumnStats> columns;

    friend bool operator==(const ContentProfile&, const ContentProfile&) = default;
};

/// Share of non-missing values that must parse as a typed kind for the
/// column to carry that type.
inline constexpr double kTypeThreshold = 0.95;

ColumnStats profile_column_values(std::string name, const std::vector<std::string_view>& values);

/// Scans every row of every column. Columns are analysed on up to `workers`
/// threads; the result does not depend on the worker count.
ContentProfile profile_table(const TableHandle& table, std::size_t workers = 1);

/// Renders the line-oriented summary fed to the LLM:
///
///   Number of Rows: 790
///   Number of Columns: 6
///   Columns:
///     - Name: Year
///       - Data Types: Text, DateTime
///       - Coverage: 2013 to 2022
///       - Unique Values: 10
///
/// The Coverage line is omitted when the column has neither temporal nor
/// numeric coverage; temporal coverage wins when both exist. Every line
/// ends with a newline.
std::string render_content_summary(const ContentProfile& profile);

void to_json(nlohmann::json& j, const ColumnStats& stats);
void from_json(const nlohmann::json& j, ColumnStats& stats);
void to_json(nlohmann::json& j, const ContentProfile& profile);
void from_json(const nlohmann::json& j, ContentProfile& profile);

}  // namespace datadesc
