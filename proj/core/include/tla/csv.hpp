#pragma once

#include <string>
#include <vector>

namespace tla {

/// Deterministic CSV emission: one fixed float format (shortest round-trip
/// via %.17g), LF line endings, no locale dependence. Identical inputs
/// produce byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row_mixed(const std::vector<std::string>& cells);

  std::string str() const;
  void write_file(const std::string& path) const;

  static std::string format_double(double v);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Minimal reader for the files this project writes (no quoting or escapes).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};
CsvTable read_csv_file(const std::string& path);

}  // namespace tla
