#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace homegcl::csv {

// RFC 4180 style table: header row plus data rows, fields may be quoted.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws LoadError naming the file when absent.
  std::size_t column(std::string_view name, const std::string& source) const;
};

Table read_file(const std::filesystem::path& path);
Table parse(std::string_view text, const std::string& source);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

// Shortest decimal representation that round-trips exactly.
std::string format_double(double v);
double parse_double(std::string_view s, const std::string& context);
long long parse_int(std::string_view s, const std::string& context);

}  // namespace homegcl::csv
