#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bogwatch::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the file
  std::vector<std::string> fields;
};

/// Comma-separated table with a header row. Fields are trimmed; quoting is
/// not supported. Blank lines and lines starting with '#' are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Column index by name; throws ParseError naming the header line if absent.
  std::size_t column(const std::string& name) const;
  std::optional<std::size_t> find_column(const std::string& name) const;
};

Table read(const std::filesystem::path& path);

double parse_double(const std::string& field, std::size_t line);
long long parse_int(const std::string& field, std::size_t line);

}  // namespace bogwatch::csv
