#include "datadesc/content_profile.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "datadesc/error.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

int to_int(std::string_view digits) {
    int value = 0;
    for (char c : digits) value = value * 10 + (c - '0');
    return value;
}

std::optional<std::int64_t> days_since_epoch(int year, int month, int day) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd}.time_since_epoch().count();
}

std::optional<Timestamp> make_timestamp(int year, int month, int day, int hour, int minute, int second,
                                        TemporalResolution resolution) {
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
    auto days = days_since_epoch(year, month, day);
    if (!days) return std::nullopt;
    return Timestamp{*days * 86400 + hour * 3600 + minute * 60 + second, resolution};
}

// Parses "HH:MM" or "HH:MM:SS".
bool parse_clock(std::string_view s, bool allow_seconds, int& h, int& m, int& sec, bool& has_seconds) {
    if (s.size() == 5 && all_digits(s.substr(0, 2)) && s[2] == ':' && all_digits(s.substr(3, 2))) {
        h = to_int(s.substr(0, 2)), m = to_int(s.substr(3, 2)), sec = 0, has_seconds = false;
        return true;
    }
    if (allow_seconds && s.size() == 8 && all_digits(s.substr(0, 2)) && s[2] == ':' && all_digits(s.substr(3, 2)) &&
        s[5] == ':' && all_digits(s.substr(6, 2))) {
        h = to_int(s.substr(0, 2)), m = to_int(s.substr(3, 2)), sec = to_int(s.substr(6, 2)), has_seconds = true;
        return true;
    }
    return false;
}

}  // namespace

std::string_view to_string(DataType type) noexcept {
    switch (type) {
        case DataType::Text: return "Text";
        case DataType::Integer: return "Integer";
        case DataType::Float: return "Float";
        case DataType::Boolean: return "Boolean";
        case DataType::DateTime: return "DateTime";
    }
    return "Text";
}

DataType data_type_from_string(std::string_view name) {
    for (auto t : {DataType::Text, DataType::Integer, DataType::Float, DataType::Boolean, DataType::DateTime}) {
        if (to_string(t) == name) return t;
    }
    throw MalformedInputError(fmt::format("unknown data type '{}'", name));
}

std::optional<std::int64_t> parse_integer(std::string_view text) noexcept {
    std::string_view digits = text;
    if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) digits.remove_prefix(1);
    if (!all_digits(digits)) return std::nullopt;
    std::int64_t value = 0;
    // from_chars rejects a leading '+', so parse the unsigned part.
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
    return text.front() == '-' ? -value : value;
}

std::optional<double> parse_float(std::string_view text) noexcept {
    std::string_view s = text;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
    std::size_t i = 0;
    std::size_t int_digits = 0;
    std::size_t frac_digits = 0;
    bool has_point = false;
    bool has_exponent = false;
    while (i < s.size() && is_digit(s[i])) ++i, ++int_digits;
    if (i < s.size() && s[i] == '.') {
        has_point = true;
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i, ++frac_digits;
    }
    if (int_digits + frac_digits == 0) return std::nullopt;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        has_exponent = true;
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && is_digit(s[i])) ++i, ++exp_digits;
        if (exp_digits == 0) return std::nullopt;
    }
    if (i != s.size() || !(has_point || has_exponent)) return std::nullopt;
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return text.front() == '-' ? -value : value;
}

std::optional<bool> parse_boolean(std::string_view text) noexcept {
    const auto lower = to_lower(text);
    if (lower == "true" || lower == "yes") return true;
    if (lower == "false" || lower == "no") return false;
    return std::nullopt;
}

std::optional<Timestamp> parse_datetime(std::string_view s) noexcept {
    using R = TemporalResolution;
    // YYYY
    if (s.size() == 4 && all_digits(s)) {
        const int year = to_int(s);
        if (year < 1800 || year > 2100) return std::nullopt;
        return make_timestamp(year, 1, 1, 0, 0, 0, R::Year);
    }
    // MM/DD/YYYY[ HH:MM]
    if (s.size() >= 10 && all_digits(s.substr(0, 2)) && s[2] == '/' && all_digits(s.substr(3, 2)) && s[5] == '/' &&
        all_digits(s.substr(6, 4))) {
        const int month = to_int(s.substr(0, 2));
        const int day = to_int(s.substr(3, 2));
        const int year = to_int(s.substr(6, 4));
        if (s.size() == 10) return make_timestamp(year, month, day, 0, 0, 0, R::Day);
        if (s[10] != ' ') return std::nullopt;
        int h = 0, m = 0, sec = 0;
        bool has_seconds = false;
        if (!parse_clock(s.substr(11), false, h, m, sec, has_seconds)) return std::nullopt;
        return make_timestamp(year, month, day, h, m, 0, R::Minute);
    }
    // YYYY-MM[-DD[( |T)HH:MM[:SS]]]
    if (s.size() >= 7 && all_digits(s.substr(0, 4)) && s[4] == '-' && all_digits(s.substr(5, 2))) {
        const int year = to_int(s.substr(0, 4));
        const int month = to_int(s.substr(5, 2));
        if (s.size() == 7) return make_timestamp(year, month, 1, 0, 0, 0, R::Month);
        if (s.size() < 10 || s[7] != '-' || !all_digits(s.substr(8, 2))) return std::nullopt;
        const int day = to_int(s.substr(8, 2));
        if (s.size() == 10) return make_timestamp(year, month, day, 0, 0, 0, R::Day);
        if (s[10] != ' ' && s[10] != 'T') return std::nullopt;
        int h = 0, m = 0, sec = 0;
        bool has_seconds = false;
        if (!parse_clock(s.substr(11), true, h, m, sec, has_seconds)) return std::nullopt;
        return make_timestamp(year, month, day, h, m, sec, has_seconds ? R::Second : R::Minute);
    }
    return std::nullopt;
}

std::string format_timestamp(const Timestamp& ts) {
    using namespace std::chrono;
    const auto day_count = static_cast<std::int64_t>(std::floor(static_cast<double>(ts.seconds) / 86400.0));
    const std::int64_t secs_of_day = ts.seconds - day_count * 86400;
    const year_month_day ymd{sys_days{days{day_count}}};
    const int y = static_cast<int>(ymd.year());
    const unsigned mo = static_cast<unsigned>(ymd.month());
    const unsigned d = static_cast<unsigned>(ymd.day());
    const auto hh = secs_of_day / 3600;
    const auto mm = (secs_of_day % 3600) / 60;
    const auto ss = secs_of_day % 60;
    switch (ts.resolution) {
        case TemporalResolution::Year: return fmt::format("{:04}", y);
        case TemporalResolution::Month: return fmt::format("{:04}-{:02}", y, mo);
        case TemporalResolution::Day: return fmt::format("{:04}-{:02}-{:02}", y, mo, d);
        case TemporalResolution::Minute: return fmt::format("{:04}-{:02}-{:02} {:02}:{:02}", y, mo, d, hh, mm);
        case TemporalResolution::Second:
            return fmt::format("{:04}-{:02}-{:02} {:02}:{:02}:{:02}", y, mo, d, hh, mm, ss);
    }
    return {};
}

std::string format_numeric(const NumericValue& value) {
    if (value.is_float) return format_float(static_cast<double>(value.value));
    return fmt::format("{}", static_cast<std::int64_t>(value.value));
}

ColumnStats profile_column_values(std::string name, const std::vector<std::string_view>& values) {
    ColumnStats stats;
    stats.name = std::move(name);

    std::unordered_set<std::string_view> distinct;
    std::size_t non_missing = 0;
    std::size_t integer_count = 0, numeric_count = 0, boolean_count = 0, datetime_count = 0, bare_year_count = 0;
    bool any_untyped = false;

    std::optional<NumericValue> num_min, num_max;
    std::optional<Timestamp> time_min, time_max;

    auto update_numeric = [&](NumericValue v) {
        // Equal extremes render as float if any occurrence was float-formatted.
        if (!num_min || v.value < num_min->value) {
            num_min = v;
        } else if (v.value == num_min->value) {
            num_min->is_float = num_min->is_float || v.is_float;
        }
        if (!num_max || v.value > num_max->value) {
            num_max = v;
        } else if (v.value == num_max->value) {
            num_max->is_float = num_max->is_float || v.is_float;
        }
    };
    auto update_temporal = [&](Timestamp t) {
        auto key = [](const Timestamp& x) { return std::pair{x.seconds, static_cast<int>(x.resolution)}; };
        if (!time_min || key(t) < key(*time_min)) time_min = t;
        if (!time_max || key(t) > key(*time_max)) time_max = t;
    };

    for (auto raw : values) {
        if (is_missing(raw)) {
            ++stats.missing_count;
            continue;
        }
        ++non_missing;
        distinct.insert(raw);
        const auto value = trim(raw);
        bool typed = false;
        if (auto i = parse_integer(value)) {
            ++integer_count, ++numeric_count, typed = true;
            update_numeric({static_cast<long double>(*i), false});
        } else if (auto f = parse_float(value)) {
            ++numeric_count, typed = true;
            update_numeric({static_cast<long double>(*f), true});
        }
        if (parse_boolean(value)) ++boolean_count, typed = true;
        if (auto t = parse_datetime(value)) {
            ++datetime_count, typed = true;
            if (t->resolution == TemporalResolution::Year) ++bare_year_count;
            update_temporal(*t);
        }
        if (!typed) any_untyped = true;
    }
    stats.unique_count = distinct.size();

    auto meets = [&](std::size_t count) {
        return non_missing > 0 && static_cast<double>(count) >= kTypeThreshold * static_cast<double>(non_missing);
    };

    if (meets(bare_year_count)) {
        // Years are both labels and timestamps.
        stats.inferred_types = {DataType::Text, DataType::DateTime};
    } else {
        if (meets(integer_count)) {
            stats.inferred_types.insert(DataType::Integer);
        } else if (meets(numeric_count)) {
            stats.inferred_types.insert(DataType::Float);
        }
        if (meets(boolean_count)) stats.inferred_types.insert(DataType::Boolean);
        if (meets(datetime_count)) stats.inferred_types.insert(DataType::DateTime);
        if (any_untyped || stats.inferred_types.empty()) stats.inferred_types.insert(DataType::Text);
    }

    if (stats.inferred_types.contains(DataType::Integer) || stats.inferred_types.contains(DataType::Float)) {
        stats.numeric_min = num_min;
        stats.numeric_max = num_max;
    }
    if (stats.inferred_types.contains(DataType::DateTime)) {
        stats.temporal_min = time_min;
        stats.temporal_max = time_max;
    }
    return stats;
}

ContentProfile profile_table(const TableHandle& table, std::size_t workers) {
    ContentProfile profile;
    profile.row_count = table.row_count();
    profile.column_count = table.column_count();
    profile.columns.resize(table.column_count());
    parallel_for(table.column_count(), workers, [&](std::size_t c) {
        std::vector<std::string_view> values;
        values.reserve(table.row_count());
        for (const auto& row : table.cells) values.emplace_back(row[c]);
        profile.columns[c] = profile_column_values(table.column_names[c], values);
    });
    return profile;
}

std::string render_content_summary(const ContentProfile& profile) {
    std::string out = fmt::format("Number of Rows: {}\nNumber of Columns: {}\nColumns:\n", profile.row_count,
                                  profile.column_count);
    for (const auto& column : profile.columns) {
        std::vector<std::string> types;
        for (auto t : column.inferred_types) types.emplace_back(to_string(t));
        out += fmt::format("  - Name: {}\n    - Data Types: {}\n", column.name, join(types, ", "));
        if (column.temporal_min && column.temporal_max) {
            out += fmt::format("    - Coverage: {} to {}\n", format_timestamp(*column.temporal_min),
                               format_timestamp(*column.temporal_max));
        } else if (column.numeric_min && column.numeric_max) {
            out += fmt::format("    - Coverage: {} to {}\n", format_numeric(*column.numeric_min),
                               format_numeric(*column.numeric_max));
        }
        out += fmt::format("    - Unique Values: {}\n", column.unique_count);
    }
    return out;
}

namespace {

std::string_view resolution_name(TemporalResolution r) {
    switch (r) {
        case TemporalResolution::Year: return "Year";
        case TemporalResolution::Month: return "Month";
        case TemporalResolution::Day: return "Day";
        case TemporalResolution::Minute: return "Minute";
        case TemporalResolution::Second: return "Second";
    }
    return "Second";
}

TemporalResolution resolution_from_name(std::string_view name) {
    for (auto r : {TemporalResolution::Year, TemporalResolution::Month, TemporalResolution::Day,
                   TemporalResolution::Minute, TemporalResolution::Second}) {
        if (resolution_name(r) == name) return r;
    }
    throw MalformedInputError(fmt::format("unknown temporal resolution '{}'", name));
}

nlohmann::json numeric_json(const std::optional<NumericValue>& v) {
    if (!v) return nullptr;
    nlohmann::json j;
    if (v->is_float) {
        j["value"] = static_cast<double>(v->value);
    } else {
        j["value"] = static_cast<std::int64_t>(v->value);
    }
    j["is_float"] = v->is_float;
    return j;
}

std::optional<NumericValue> numeric_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    NumericValue v;
    v.is_float = j.at("is_float").get<bool>();
    v.value = v.is_float ? static_cast<long double>(j.at("value").get<double>())
                         : static_cast<long double>(j.at("value").get<std::int64_t>());
    return v;
}

nlohmann::json temporal_json(const std::optional<Timestamp>& t) {
    if (!t) return nullptr;
    return {{"text", format_timestamp(*t)}, {"epoch_seconds", t->seconds},
            {"resolution", resolution_name(t->resolution)}};
}

std::optional<Timestamp> temporal_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return Timestamp{j.at("epoch_seconds").get<std::int64_t>(),
                     resolution_from_name(j.at("resolution").get<std::string>())};
}

}  // namespace

void to_json(nlohmann::json& j, const ColumnStats& s) {
    auto types = nlohmann::json::array();
    for (auto t : s.inferred_types) types.push_back(to_string(t));
    j = {{"name", s.name},
         {"inferred_types", types},
         {"numeric_min", numeric_json(s.numeric_min)},
         {"numeric_max", numeric_json(s.numeric_max)},
         {"temporal_min", temporal_json(s.temporal_min)},
         {"temporal_max", temporal_json(s.temporal_max)},
         {"unique_count", s.unique_count},
         {"missing_count", s.missing_count}};
}

void from_json(const nlohmann::json& j, ColumnStats& s) {
    s.name = j.at("name").get<std::string>();
    s.inferred_types.clear();
    for (const auto& t : j.at("inferred_types")) s.inferred_types.insert(data_type_from_string(t.get<std::string>()));
    s.numeric_min = numeric_from_json(j.at("numeric_min"));
    s.numeric_max = numeric_from_json(j.at("numeric_max"));
    s.temporal_min = temporal_from_json(j.at("temporal_min"));
    s.temporal_max = temporal_from_json(j.at("temporal_max"));
    s.unique_count = j.at("unique_count").get<std::size_t>();
    s.missing_count = j.at("missing_count").get<std::size_t>();
}

void to_json(nlohmann::json& j, const ContentProfile& p) {
    j = {{"row_count", p.row_count}, {"column_count", p.column_count}, {"columns", p.columns}};
}

void from_json(const nlohmann::json& j, ContentProfile& p) {
    p.row_count = j.at("row_count").get<std::size_t>();
    p.column_count = j.at("column_count").get<std::size_t>();
    p.columns = j.at("columns").get<std::vector<ColumnStats>>();
}

}  // namespace datadesc
