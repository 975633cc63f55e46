#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kgforge::materialize {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parsed CSV file: comma separated, '"' quoting with '""' escapes, first
// row is the header. Empty cells are nulls.
struct RowSource {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string origin;

  // Index of `column` in the header, or -1.
  int column_index(std::string_view column) const;
};

RowSource parse_csv(std::string_view text, std::string origin = "<memory>");
RowSource read_csv(const std::filesystem::path& path);
// Reads only the header row.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

// Quotes a cell when it contains a comma, quote or line break.
std::string csv_escape(std::string_view cell);
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace kgforge::materialize
