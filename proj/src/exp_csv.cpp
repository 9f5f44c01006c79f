#include "dagcn/exp/csv.hpp"

#include <iomanip>
#include <sstream>

namespace dagcn::exp {

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
  if (!out_) throw IoError("CsvWriter: cannot open " + path);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ",";
    out_ << cells[i];
  }
  out_ << "\n";
  out_.flush();
}

std::string CsvWriter::num(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

std::string CsvWriter::sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw IoError("read_csv_column: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("read_csv_column: empty file " + path);

  auto split = [](const std::string& text) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(text);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!text.empty() && text.back() == ',') cells.push_back("");
    return cells;
  };

  const std::vector<std::string> header = split(line);
  std::size_t index = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) index = i;
  }
  if (index == header.size()) {
    throw IoError("read_csv_column: no column '" + column + "' in " + path);
  }

  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (index >= cells.size()) throw IoError("read_csv_column: short row in " + path);
    values.push_back(std::stod(cells[index]));
  }
  return values;
}

}  // namespace dagcn::exp
