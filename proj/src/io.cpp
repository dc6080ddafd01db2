#include "ylab/io.hpp"

#include <cstdio>
#include <fstream>

#include "ylab/errors.hpp"

namespace ylab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_input_error("cannot open output file " + tmp);
    out << content;
    if (!out) throw invalid_input_error("failed writing " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw invalid_input_error("failed to move " + tmp + " into place");
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size())
    throw invalid_input_error("CsvWriter: row width mismatch");
  rows_.push_back(values);
}

std::string CsvWriter::str() const {
  std::string out;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c > 0) out += ',';
    out += columns_[c];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ylab
