#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace datadesc {

/// An ingested CSV table. Immutable after ingestion; every row has exactly
/// column_names.size() cells and empty strings stand for missing values.
struct TableHandle {
    std::string dataset_id;
    std::string title;
    std::optional<std::string> original_description;
    std::vector<std::string> column_names;
    std::vector<std::vector<std::string>> cells;
    std::filesystem::path source_path;
    std::vector<std::string> ingest_warnings;

    std::size_t row_count() const noexcept { return cells.size(); }
    std::size_t column_count() const noexcept { return column_names.size(); }
};

struct RowSample {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_indices;
    std::uint64_t seed = 0;
    std::size_t sample_size = 0;
};

inline constexpr std::size_t kDefaultRowSampleSize = 5;
inline constexpr std::size_t kDefaultValueSampleSize = 5;

/// Cells equal to "", "NA", "N/A", "null", "NULL" or "-" count as missing
/// during profiling. Ingestion keeps them verbatim.
bool is_missing(std::string_view cell) noexcept;

TableHandle ingest_csv(const std::filesystem::path& path, std::string dataset_id, std::string title,
                       std::optional<std::string> original_description = std::nullopt);

/// Parses CSV text already in memory. `source_path` is informational only.
TableHandle ingest_csv_text(std::string_view text, std::string dataset_id, std::string title,
                            std::optional<std::string> original_description = std::nullopt,
                            std::filesystem::path source_path = {});

/// Serialises a table back to CSV (header + rows).
std::string to_csv(const TableHandle& table);

/// Uniform sample without replacement. Sample order is the order produced
/// by a seeded Fisher-Yates pass; when sample_size covers the table all rows
/// come back in their original order.
RowSample sample_rows(const TableHandle& table, std::size_t sample_size, std::uint64_t seed);

/// Up to sample_size distinct non-missing values of one column.
std::vector<std::string> sample_column_values(const TableHandle& table, std::size_t column_index,
                                              std::size_t sample_size, std::uint64_t seed);

/// Seeded generator shared by every sampler: a 64-bit Mersenne Twister with
/// rejection-sampled bounded draws, so results do not depend on the standard
/// library's distribution implementations.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

struct ManifestEntry {
    std::string dataset_id;
    std::string title;
    std::optional<std::string> description;
    std::filesystem::path csv_path;
};

/// Reads a JSON-lines corpus manifest. Relative csv_path values resolve
/// against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

TableHandle ingest_entry(const ManifestEntry& entry);

}  // namespace datadesc
