#pragma once

#include <string>
#include <vector>

#include "becca/core_stats.hpp"

namespace becca {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws DataError when the column is absent.
  size_t column(const std::string& name) const;
};

/// RFC-4180 parser: quoted fields, doubled quotes, CRLF or LF. The first
/// record is the header. Throws DataError with 1-based line and column on
/// malformed quoting or ragged rows.
CsvTable parse_csv(const std::string& text);
std::string write_csv(const CsvTable& table);

/// Numeric matrix of the named columns (all columns when empty); throws
/// DataError naming the row and column of the first missing or
/// non-numeric cell. Rows are numbered as data rows starting at 1.
MatrixXd numeric_columns(const CsvTable& table, const std::vector<std::string>& names = {});

/// Shortest decimal that round-trips.
std::string format_double(double x);

std::string read_file(const std::string& path);
/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace becca
