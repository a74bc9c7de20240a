#pragma once

#include <string>
#include <vector>

#include "cylflow/common.hpp"

namespace cylflow {

// Deterministic CSV: doubles are written with std::to_chars (shortest
// round-trip), so identical data produces identical bytes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

std::string format_double(double x);
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace cylflow
