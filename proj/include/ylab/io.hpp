#pragma once

#include <string>
#include <vector>

namespace ylab {

// 17 significant digits, enough to round-trip any double exactly.
std::string format_double(double v);

// Writes content to path atomically (temp file in the same directory, then
// rename).
void atomic_write(const std::string& path, const std::string& content);

// Rows of named columns rendered as CSV with format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<double>& values);
  std::string str() const;
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace ylab
