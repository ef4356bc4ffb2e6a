#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ibrisk::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based line number of each data row in the source file, for messages.
    std::vector<std::size_t> line_numbers;

    std::optional<std::size_t> column(const std::string& name) const;
};

// Strict reader for the plain comma-separated files this toolkit exchanges:
// UTF-8, decimal points, no quoting, no thousands separators.
Table read_file(const std::filesystem::path& path);

// Field parsers that name the file location on failure.
double parse_double(const std::string& field, const std::filesystem::path& path,
                    std::size_t line, const std::string& column);
int parse_int(const std::string& field, const std::filesystem::path& path,
              std::size_t line, const std::string& column);

// Shortest round-trip decimal form (std::to_chars), so identical doubles
// always serialize to identical bytes.
std::string format_double(double v);

} // namespace ibrisk::csv
