#include "blochspec/report.hpp"

#include <sstream>

namespace blochspec {

std::vector<std::string> metadata_block(const RunConfig& config) {
  std::vector<std::string> lines;
  std::ostringstream hash;
  hash << std::hex << config.hash64();
  lines.push_back("config_hash=" + hash.str());
  lines.push_back("N=" + std::to_string(config.N));
  lines.push_back("L=" + std::to_string(config.L));
  lines.push_back("radius=" + std::to_string(config.radius));
  lines.push_back("delta_min=" + format_g17(config.tol.delta_min));
  lines.push_back("flat_tol=" + format_g17(config.tol.flat_tol));
  lines.push_back("grad_tol=" + format_g17(config.tol.grad_tol));
  lines.push_back("hess_tol=" + format_g17(config.tol.hess_tol));
  lines.push_back("tol_psd=" + format_g17(config.tol.tol_psd));
  lines.push_back("t_model=T1+T2, O(e^4) dropped");
  lines.push_back("seed=" + std::to_string(config.seed));
  return lines;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& metadata,
                     const std::vector<std::string>& columns)
    : out_(path), ncols_(columns.size()) {
  if (!out_) throw Error("CsvWriter: cannot open " + path);
  for (const auto& m : metadata) out_ << "# " << m << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_) throw Error("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << format_g17(values[i]) << (i + 1 < values.size() ? "," : "");
  out_ << "\n";
}

void CsvWriter::row_cells(const std::vector<std::string>& cells) {
  if (cells.size() != ncols_) throw Error("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
  out_ << "\n";
}

void CsvWriter::close() {
  out_.flush();
  out_.close();
  if (!out_) throw Error("CsvWriter: write failed");
}

}  // namespace blochspec
