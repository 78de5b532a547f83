#pragma once

// Headerless comma-separated numeric tables: one sample vector per row.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rvspec/core_types.hpp"

namespace rvspec {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_field(std::string_view field, std::size_t line, std::size_t column) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                           ": cannot parse '" + std::string(field) + "' as a number");
  }
  return value;
}

}  // namespace detail

/// Blank lines are ignored. Every nonblank row must have the same number of
/// fields. Line numbers in errors are 1-based.
inline DataMatrix read_csv(std::istream& in, bool skip_header = false) {
  std::vector<double> values;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::size_t line_number = 0;
  std::string line;
  bool header_pending = skip_header;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      const auto field = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      values.push_back(detail::parse_field(field, line_number, fields + 1));
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      dim = fields;
    } else if (fields != dim) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_number) + ": expected " +
                                             std::to_string(dim) + " fields, found " + std::to_string(fields));
    }
    ++rows;
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failure");
  return DataMatrix(rows, dim, std::move(values));
}

inline DataMatrix read_csv_file(const std::string& path, bool skip_header = false) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_csv(in, skip_header);
}

/// 17 significant digits, so every value reads back bit-identically.
inline void write_csv(std::ostream& out, const DataMatrix& data) {
  char buffer[32];
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.dim(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", data(i, j));
      if (j > 0) out << ',';
      out << buffer;
    }
    out << '\n';
  }
}

inline void write_csv_file(const std::string& path, const DataMatrix& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  write_csv(out, data);
  if (!out) throw Error(ErrorCode::IoError, "write failure on '" + path + "'");
}

}  // namespace rvspec
