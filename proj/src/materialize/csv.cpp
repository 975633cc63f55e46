#include "kgforge/materialize/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace kgforge::materialize {

int RowSource::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) return static_cast<int>(i);
  }
  return -1;
}

namespace {

// Splits the whole text into records; returns false at end of input.
class CsvScanner {
 public:
  CsvScanner(std::string_view text, const std::string& origin) : s_(text), origin_(origin) {
    if (s_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  bool next(std::vector<std::string>& record) {
    record.clear();
    if (pos_ >= s_.size()) return false;
    ++line_;
    std::string cell;
    while (true) {
      if (pos_ < s_.size() && s_[pos_] == '"') {
        ++pos_;
        std::size_t start_line = line_;
        while (true) {
          if (pos_ >= s_.size()) {
            throw CsvError(origin_ + ":" + std::to_string(start_line) + ": unterminated quoted field");
          }
          char c = s_[pos_++];
          if (c == '"') {
            if (pos_ < s_.size() && s_[pos_] == '"') {
              cell += '"';
              ++pos_;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line_;
            cell += c;
          }
        }
        if (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '\n' && s_[pos_] != '\r') {
          throw CsvError(origin_ + ":" + std::to_string(line_) + ": text after closing quote");
        }
      } else {
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '\n' && s_[pos_] != '\r') {
          cell += s_[pos_++];
        }
      }
      record.push_back(std::move(cell));
      cell.clear();
      if (pos_ >= s_.size()) return true;
      char c = s_[pos_++];
      if (c == ',') continue;
      if (c == '\r' && pos_ < s_.size() && s_[pos_] == '\n') ++pos_;
      return true;
    }
  }

  std::size_t line() const { return line_; }

 private:
  std::string_view s_;
  const std::string& origin_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

RowSource parse_csv(std::string_view text, std::string origin) {
  RowSource src;
  src.origin = std::move(origin);
  CsvScanner scanner(text, src.origin);
  std::vector<std::string> record;
  if (!scanner.next(record)) return src;
  src.header = record;
  while (scanner.next(record)) {
    if (record.size() == 1 && record[0].empty() && src.header.size() != 1) continue;  // blank line
    if (record.size() != src.header.size()) {
      throw CsvError(src.origin + ":" + std::to_string(scanner.line()) + ": expected " +
                     std::to_string(src.header.size()) + " fields, got " + std::to_string(record.size()));
    }
    src.rows.push_back(record);
  }
  return src;
}

RowSource read_csv(const std::filesystem::path& path) { return parse_csv(slurp(path), path.string()); }

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  return parse_csv(line, path.string()).header;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(cells[i]);
  }
  out << '\n';
}

}  // namespace kgforge::materialize
