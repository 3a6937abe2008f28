#include "bogwatch/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bogwatch/error.hpp"

namespace bogwatch::csv {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::optional<std::size_t> Table::find_column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Table::column(const std::string& name) const {
  if (auto i = find_column(name)) return *i;
  throw ParseError(1, "missing column '" + name + "'");
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  Table t;
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++n;
    const std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = split(trimmed);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError(n, "expected " + std::to_string(t.header.size()) + " fields, got " +
                              std::to_string(fields.size()));
    }
    t.rows.push_back({n, std::move(fields)});
  }
  if (!have_header) throw ParseError(1, "empty file " + path.string());
  return t;
}

double parse_double(const std::string& field, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "not a number: '" + field + "'");
  }
}

long long parse_int(const std::string& field, std::size_t line) {
  long long v = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError(line, "not an integer: '" + field + "'");
  return v;
}

}  // namespace bogwatch::csv
