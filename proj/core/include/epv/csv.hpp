#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace epv {

/// Minimal CSV table with optional leading `# key=value` comment lines.
/// Quoting: fields containing commas, quotes or newlines are double-quoted
/// on write; the reader understands the same convention.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments;  // without the leading "# "

    std::optional<std::size_t> column(const std::string& name) const;
    const std::string& at(std::size_t row, const std::string& col) const;
};

std::string csv_escape(const std::string& field);
std::string csv_to_string(const CsvTable& table);
CsvTable csv_parse(const std::string& text);
CsvTable csv_read_file(const std::string& path);
void csv_write_file(const CsvTable& table, const std::string& path);

/// Fixed-format float for table output ("%.4f" style).
std::string format_fixed(double value, int decimals);
/// Shortest exact round-trip representation ("%.17g") for internal artifacts.
std::string format_full(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace epv
