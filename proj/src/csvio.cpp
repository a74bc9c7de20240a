#include "cylflow/csvio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cylflow {

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw input_error("CSV is missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw input_error("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw input_error("CSV row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  if (!out.good()) throw input_error("write to '" + path + "' failed");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw input_error("'" + path + "' is empty");
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find(',', pos);
      if (next == std::string::npos) next = line.size();
      const std::string tok = line.substr(pos, next - pos);
      if (tok == "nan") {
        row.push_back(std::nan(""));
      } else {
        double val = 0.0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), val);
        if (res.ec != std::errc())
          throw input_error("'" + path + "': cannot parse number '" + tok + "'");
        row.push_back(val);
      }
      pos = next + 1;
      if (next == line.size()) break;
    }
    if (row.size() != table.header.size())
      throw input_error("'" + path + "': row width does not match the header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace cylflow
