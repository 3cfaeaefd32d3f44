#include "becca/csv.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "becca/errors.hpp"

namespace becca {

size_t CsvTable::column(const std::string& name) const {
  for (size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw DataError("CSV has no column named '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  long line = 1;
  long col = 1;
  size_t i = 0;
  auto location = [&] { return " at line " + std::to_string(line) + ", column " + std::to_string(col); };
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          col += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        ++col;
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
          throw DataError("CSV: unexpected character after closing quote" + location());
        continue;
      }
      if (c == '\n') {
        ++line;
        col = 0;
      }
      field += c;
      ++i;
      ++col;
      continue;
    }
    if (c == '"') {
      if (!field.empty() || field_was_quoted) throw DataError("CSV: quote inside an unquoted field" + location());
      in_quotes = true;
      field_was_quoted = true;
      ++i;
      ++col;
    } else if (c == ',') {
      end_field();
      ++i;
      ++col;
    } else if (c == '\r' || c == '\n') {
      end_record();
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++i;
      ++line;
      col = 1;
    } else {
      field += c;
      ++i;
      ++col;
    }
  }
  if (in_quotes) throw DataError("CSV: unterminated quoted field" + location());
  if (!field.empty() || field_was_quoted || !record.empty()) end_record();

  CsvTable table;
  if (records.empty()) throw DataError("CSV: missing header row");
  table.header = std::move(records.front());
  for (size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() == 1 && records[r][0].empty()) continue;  // blank line
    if (records[r].size() != table.header.size())
      throw DataError("CSV: record " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                      " fields, header has " + std::to_string(table.header.size()));
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

namespace {

std::string quote_field(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_record(std::ostringstream& out, const std::vector<std::string>& rec) {
  for (size_t k = 0; k < rec.size(); ++k) {
    if (k) out << ',';
    out << quote_field(rec[k]);
  }
  out << '\n';
}

}  // namespace

std::string write_csv(const CsvTable& table) {
  std::ostringstream out;
  write_record(out, table.header);
  for (const auto& r : table.rows) write_record(out, r);
  return out.str();
}

MatrixXd numeric_columns(const CsvTable& table, const std::vector<std::string>& names) {
  std::vector<size_t> idx;
  std::vector<std::string> labels;
  if (names.empty()) {
    for (size_t k = 0; k < table.header.size(); ++k) idx.push_back(k);
    labels = table.header;
  } else {
    for (const auto& n : names) idx.push_back(table.column(n));
    labels = names;
  }
  MatrixXd out(static_cast<Index>(table.rows.size()), static_cast<Index>(idx.size()));
  for (size_t r = 0; r < table.rows.size(); ++r) {
    for (size_t k = 0; k < idx.size(); ++k) {
      const std::string& cell = table.rows[r][idx[k]];
      double value = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      while (first < last && *first == ' ') ++first;
      while (last > first && last[-1] == ' ') --last;
      const auto res = std::from_chars(first, last, value);
      if (first == last || res.ec != std::errc() || res.ptr != last || !std::isfinite(value))
        throw DataError("CSV: row " + std::to_string(r + 1) + ", column '" + labels[k] + "' (" +
                        std::to_string(idx[k] + 1) + "): " + (first == last ? "missing value" : "not a number '" + cell + "'"));
      out(static_cast<Index>(r), static_cast<Index>(k)) = value;
    }
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
  }
}

}  // namespace becca
