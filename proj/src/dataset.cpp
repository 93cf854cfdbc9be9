#include "datadesc/dataset.hpp"

#include <array>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "datadesc/csv.hpp"
#include "datadesc/error.hpp"
#include "datadesc/util.hpp"

namespace datadesc {

bool is_missing(std::string_view cell) noexcept {
    static constexpr std::array<std::string_view, 6> kMissing{"", "NA", "N/A", "null", "NULL", "-"};
    for (auto token : kMissing) {
        if (cell == token) return true;
    }
    return false;
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
    // Reject the low 2^64 mod bound outputs so the modulo is unbiased.
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t r = engine_();
        if (r >= threshold) return r % bound;
    }
}

namespace {

std::vector<std::string> normalize_header(const csv::Record& header) {
    std::vector<std::string> names;
    names.reserve(header.size());
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < header.size(); ++i) {
        auto name = trim(header[i]);
        if (name.empty()) name = fmt::format("column_{}", i + 1);
        if (seen.contains(name)) {
            std::string candidate;
            for (std::size_t ordinal = 1;; ++ordinal) {
                candidate = fmt::format("{}_{}", name, ordinal);
                if (!seen.contains(candidate)) break;
            }
            name = candidate;
        }
        seen.insert(name);
        names.push_back(std::move(name));
    }
    return names;
}

}  // namespace

TableHandle ingest_csv_text(std::string_view text, std::string dataset_id, std::string title,
                            std::optional<std::string> original_description,
                            std::filesystem::path source_path) {
    auto records = csv::parse(text);
    if (records.empty() || records.front().empty()) {
        throw MalformedInputError("no header row in " + source_path.string());
    }
    TableHandle table;
    table.dataset_id = std::move(dataset_id);
    table.title = std::move(title);
    table.original_description = std::move(original_description);
    table.source_path = std::move(source_path);
    table.column_names = normalize_header(records.front());
    const auto width = table.column_names.size();

    table.cells.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        auto& row = records[r];
        if (row.size() < width) {
            table.ingest_warnings.push_back(
                fmt::format("line {}: {} of {} fields, padded", r + 1, row.size(), width));
            row.resize(width);
        } else if (row.size() > width) {
            table.ingest_warnings.push_back(
                fmt::format("line {}: {} of {} fields, extra fields dropped", r + 1, row.size(), width));
            row.resize(width);
        }
        table.cells.push_back(std::move(row));
    }
    return table;
}

TableHandle ingest_csv(const std::filesystem::path& path, std::string dataset_id, std::string title,
                       std::optional<std::string> original_description) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    return ingest_csv_text(text, std::move(dataset_id), std::move(title), std::move(original_description), path);
}

std::string to_csv(const TableHandle& table) {
    std::string out = csv::format_record(table.column_names) + "\n";
    for (const auto& row : table.cells) out += csv::format_record(row) + "\n";
    return out;
}

RowSample sample_rows(const TableHandle& table, std::size_t sample_size, std::uint64_t seed) {
    if (sample_size == 0) throw ContractViolation("sample_rows: sample_size must be >= 1");
    RowSample sample;
    sample.seed = seed;
    sample.sample_size = sample_size;
    const std::size_t n = table.row_count();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (sample_size < n) {
        // First sample_size steps of a forward Fisher-Yates shuffle.
        SeededRng rng(seed);
        for (std::size_t i = 0; i < sample_size; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(order[i], order[j]);
        }
        order.resize(sample_size);
    }
    sample.row_indices = order;
    sample.rows.reserve(order.size());
    for (auto index : order) sample.rows.push_back(table.cells[index]);
    return sample;
}

std::vector<std::string> sample_column_values(const TableHandle& table, std::size_t column_index,
                                              std::size_t sample_size, std::uint64_t seed) {
    if (column_index >= table.column_count()) {
        throw ContractViolation(fmt::format("column index {} out of range ({} columns)", column_index,
                                            table.column_count()));
    }
    std::vector<std::string> distinct;
    std::unordered_set<std::string_view> seen;
    for (const auto& row : table.cells) {
        const auto& cell = row[column_index];
        if (is_missing(cell)) continue;
        if (seen.insert(cell).second) distinct.push_back(cell);
    }
    if (sample_size >= distinct.size()) return distinct;
    SeededRng rng(seed);
    for (std::size_t i = 0; i < sample_size; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(distinct.size() - i));
        std::swap(distinct[i], distinct[j]);
    }
    distinct.resize(sample_size);
    return distinct;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    const auto text = read_file(path);
    const auto base = path.parent_path();
    std::vector<ManifestEntry> entries;
    std::unordered_set<std::string> ids;
    std::size_t line_number = 0;
    for (const auto& line : split(text, '\n')) {
        ++line_number;
        if (trim(line).empty()) continue;
        nlohmann::json object;
        try {
            object = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedInputError(fmt::format("{}:{}: {}", path.string(), line_number, e.what()));
        }
        ManifestEntry entry;
        try {
            entry.dataset_id = object.at("dataset_id").get<std::string>();
            entry.title = object.value("title", entry.dataset_id);
            if (auto it = object.find("description"); it != object.end() && !it->is_null()) {
                entry.description = it->get<std::string>();
            }
            entry.csv_path = object.value("csv_path", std::string{});
        } catch (const nlohmann::json::exception& e) {
            throw MalformedInputError(fmt::format("{}:{}: {}", path.string(), line_number, e.what()));
        }
        if (!entry.csv_path.empty() && entry.csv_path.is_relative()) entry.csv_path = base / entry.csv_path;
        if (!ids.insert(entry.dataset_id).second) {
            throw MalformedInputError(fmt::format("{}:{}: duplicate dataset_id '{}'", path.string(), line_number,
                                                  entry.dataset_id));
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

TableHandle ingest_entry(const ManifestEntry& entry) {
    auto title = entry.title.empty() ? entry.dataset_id : entry.title;
    return ingest_csv(entry.csv_path, entry.dataset_id, std::move(title), entry.description);
}

}  // namespace datadesc
