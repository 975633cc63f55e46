#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "kgforge/sparql/ast.hpp"

namespace kgforge::sparql {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedFeature : public std::runtime_error {
 public:
  UnsupportedFeature(std::string feature, std::size_t line, std::size_t column)
      : std::runtime_error("unsupported feature (" + feature + ") at line " + std::to_string(line) + ", column " +
                           std::to_string(column)),
        feature_(std::move(feature)),
        line_(line),
        column_(column) {}
  const std::string& feature() const { return feature_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string feature_;
  std::size_t line_;
  std::size_t column_;
};

// Parses a SELECT query of the supported subset.
Query parse_query(std::string_view text);

}  // namespace kgforge::sparql
