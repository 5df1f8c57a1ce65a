#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elyte::csv {

/// A parsed CSV file: header row plus data rows (RFC 4180 quoting).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  /// Index of a required column; throws MissingColumn naming `source`.
  std::size_t require(std::string_view name, std::string_view source) const;
};

Table parse(std::istream& in);
Table read_file(const std::filesystem::path& path);

/// Quote a field when it contains a delimiter, quote or newline.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

double to_double(std::string_view text, std::string_view context);

/// Shortest text that parses back to exactly `v`.
std::string number(double v);

}  // namespace elyte::csv
