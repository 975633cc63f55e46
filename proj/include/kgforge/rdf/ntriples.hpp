#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/rdf/term.hpp"

namespace kgforge::rdf {

class NTriplesParseError : public std::runtime_error {
 public:
  NTriplesParseError(std::size_t line, std::size_t offset, const std::string& message);
  std::size_t line() const { return line_; }
  // Byte offset of the error from the start of the input.
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

struct NTriplesOptions {
  // Escape everything outside printable ASCII as \uXXXX / \UXXXXXXXX.
  bool ascii_only = false;
};

void write_ntriples(std::ostream& out, const Triple& triple, NTriplesOptions options = {});
void write_ntriples(std::ostream& out, const std::vector<Triple>& triples,
                    NTriplesOptions options = {});
std::string serialize_ntriples(const std::vector<Triple>& triples, NTriplesOptions options = {});

// Parses a single statement line (no trailing newline). Empty and comment
// lines yield false.
bool parse_ntriples_line(std::string_view line, Triple& out, std::size_t line_number = 1,
                         std::size_t line_offset = 0);

// Streams triples to `sink`; throws NTriplesParseError at the first bad line.
void parse_ntriples(std::istream& in, const std::function<void(Triple&&)>& sink);
std::vector<Triple> parse_ntriples(std::string_view text);
std::vector<Triple> parse_ntriples_file(const std::string& path);

}  // namespace kgforge::rdf
