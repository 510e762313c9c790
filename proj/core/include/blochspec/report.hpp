// Deterministic CSV emission: metadata header block ('# key=value' lines),
// then a column header and rows with all floats at 17 significant digits.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "blochspec/config.hpp"

namespace blochspec {

// The metadata block recorded at the top of every output file.
std::vector<std::string> metadata_block(const RunConfig& config);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& metadata,
            const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);
  // mixed row: preformatted cells
  void row_cells(const std::vector<std::string>& cells);
  void close();

 private:
  std::ofstream out_;
  std::size_t ncols_;
};

}  // namespace blochspec
