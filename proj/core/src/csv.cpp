#include "tla/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tla/tensor.hpp"

namespace tla {

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

std::string CsvWriter::format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::add_row(const std::vector<double>& values) {
  check(values.size() == header_.size(), "CsvWriter: row width mismatch");
  std::vector<std::string> cells(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) cells[i] = format_double(values[i]);
  rows_.push_back(std::move(cells));
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& cells) {
  check(cells.size() == header_.size(), "CsvWriter: row width mismatch");
  rows_.push_back(cells);
}

std::string CsvWriter::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  check(static_cast<bool>(f), "CsvWriter: cannot open " + path + " for writing");
  const std::string s = str();
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  check(static_cast<bool>(f), "CsvWriter: write failed for " + path);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ContractError("CsvTable: no column named '" + name + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  return std::stod(rows.at(row).at(col));
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  check(static_cast<bool>(f), "read_csv_file: cannot open " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

}  // namespace tla
