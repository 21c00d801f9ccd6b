#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace metallab::cli {

using Document = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// Reads the TOML subset used by scenario files: comments, [table] and
/// [dotted.table] headers, bare or quoted keys, basic strings, integers,
/// floats, booleans, (multi-line) arrays and inline tables. Key order is
/// preserved. Redefining a key or table is an error.
Document parse_toml(std::string_view text);

}  // namespace metallab::cli
