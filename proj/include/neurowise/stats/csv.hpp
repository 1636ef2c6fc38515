#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace neurowise::stats {

/// Header row plus data rows. Handles RFC 4180 quoting; a UTF-8 BOM is skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based line number in the source for each row, for diagnostics.
    std::vector<std::size_t> line_numbers;

    std::optional<std::size_t> column(std::string_view name) const;
};

/// Throws SchemaError on unterminated quotes or an empty document.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Quotes a field if it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

/// Strict dot-decimal parse of the whole cell; nullopt on failure.
std::optional<double> parse_number(std::string_view cell);

}  // namespace neurowise::stats
