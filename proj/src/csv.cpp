#include "csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>

namespace sitealloc::detail {
namespace {

bool skip_line(const std::string& s) { return s.empty() || s.front() == '#'; }

}  // namespace

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw InputError(where + ": unterminated quote");
  out.push_back(trim(cell));
  return out;
}

CsvReader::CsvReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    raw = trim(raw);
    if (line_ == 1 && raw.rfind("\xEF\xBB\xBF", 0) == 0) raw.erase(0, 3);
    if (skip_line(raw)) continue;
    const auto header = split_csv_line(raw, name_ + ":" + std::to_string(line_));
    for (std::size_t i = 0; i < header.size(); ++i) columns_[header[i]] = i;
    return;
  }
  throw InputError(name_ + ": missing header");
}

bool CsvReader::next() {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    raw = trim(raw);
    if (skip_line(raw)) continue;
    row_ = split_csv_line(raw, name_ + ":" + std::to_string(line_));
    if (row_.size() > columns_.size()) fail("too many fields");
    return true;
  }
  return false;
}

std::string CsvReader::get(const std::string& column) const {
  auto it = columns_.find(column);
  if (it == columns_.end() || it->second >= row_.size()) return {};
  return row_[it->second];
}

std::string CsvReader::require(const std::string& column) const {
  if (!has_column(column)) throw InputError(name_ + ": missing column '" + column + "'");
  auto v = get(column);
  if (v.empty()) fail("empty '" + column + "'");
  return v;
}

double CsvReader::number(const std::string& column) const {
  const auto text = require(column);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end != text.c_str() + text.size()) fail("'" + column + "' is not a number: " + text);
  return v;
}

std::optional<double> CsvReader::optional_number(const std::string& column) const {
  if (get(column).empty()) return std::nullopt;
  return number(column);
}

std::int64_t CsvReader::integer(const std::string& column) const {
  const auto text = require(column);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    fail("'" + column + "' is not an integer: " + text);
  return v;
}

void CsvReader::fail(const std::string& message) const {
  throw InputError(name_ + ":" + std::to_string(line_) + ": " + message);
}

}  // namespace sitealloc::detail
