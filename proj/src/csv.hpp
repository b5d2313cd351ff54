#pragma once

// Minimal delimited-text reader shared by the loaders. Handles a header row,
// `#` comment lines, blank lines, CRLF endings and double-quoted fields.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sitealloc/domain.hpp"

namespace sitealloc::detail {

std::string trim(std::string s);

std::vector<std::string> split_csv_line(const std::string& line, const std::string& where);

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string name);

  bool next();
  std::size_t line() const { return line_; }
  bool has_column(const std::string& column) const { return columns_.contains(column); }
  /// Empty string when the column is absent or the cell is empty.
  std::string get(const std::string& column) const;
  std::string require(const std::string& column) const;
  double number(const std::string& column) const;
  std::optional<double> optional_number(const std::string& column) const;
  std::int64_t integer(const std::string& column) const;
  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::istream& in_;
  std::string name_;
  std::size_t line_ = 0;
  std::map<std::string, std::size_t> columns_;
  std::vector<std::string> row_;
};

}  // namespace sitealloc::detail
