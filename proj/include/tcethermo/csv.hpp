#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace tce {

using CsvCell = std::variant<std::string, double, std::int64_t>;

/// Column table written with doubles at 17 significant digits, so that a
/// value read back is bit-identical. Infinities print as inf / -inf.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<CsvCell> row);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  std::string str() const;
  /// Writes through a temporary file and a rename. Throws IoError.
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

std::string format_double(double v);

/// Writes `content` to `path` via `path.tmp` and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace tce
