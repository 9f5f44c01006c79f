#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "dagcn/types.hpp"

namespace dagcn::exp {

/// Minimal CSV writer: header plus rows of pre-formatted cells.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void row(const std::vector<std::string>& cells);

  static std::string num(double value);      // 17 significant digits
  static std::string sanitize(std::string text);  // commas/newlines -> spaces

 private:
  std::ofstream out_;
};

/// Parses a numeric column (by header name) back out of a CSV file.
std::vector<double> read_csv_column(const std::string& path, const std::string& column);

}  // namespace dagcn::exp
