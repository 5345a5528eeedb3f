#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mefm/series.hpp"

namespace mefm::io {

/// Round-trip-safe text for a double (17 significant digits).
[[nodiscard]] std::string format_double(double v);

/// Long CSV: header `t,i,j,value`, 1-based indices, t-major then i then j.
void write_series_csv(std::ostream& out, const MatrixSeries& series);
/// Parses the long CSV format. Rows may come in any order but every (t,i,j)
/// of the implied grid must appear exactly once. Throws DataError naming the
/// offending line or the first missing (t,i,j).
[[nodiscard]] MatrixSeries read_series_csv(std::istream& in);

void save_series(const std::filesystem::path& path, const MatrixSeries& series);
[[nodiscard]] MatrixSeries load_series(const std::filesystem::path& path);

/// Write via a temporary sibling file and rename. Throws DataError on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Row-oriented CSV builder.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  [[nodiscard]] std::size_t size() const { return rows_.size(); }
  [[nodiscard]] std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Matrix as CSV with header `row,c1..cK` (1-based row labels).
[[nodiscard]] std::string matrix_csv(const Matrix& m, const std::string& row_label = "row");

}  // namespace mefm::io
