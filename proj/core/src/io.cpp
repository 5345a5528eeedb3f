#include "mefm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include "mefm/errors.hpp"

namespace mefm::io {
namespace {

std::string line_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

std::string_view strip_cr(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

long parse_index(std::string_view cell, std::size_t line_no, const char* name) {
  cell = strip_cr(cell);
  long v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || v < 1) {
    throw DataError(line_error(line_no, std::string("bad ") + name + " index '" +
                                            std::string(cell) + "'"));
  }
  return v;
}

double parse_value(std::string_view cell, std::size_t line_no) {
  cell = strip_cr(cell);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    throw DataError(line_error(line_no, "bad value '" + std::string(cell) + "'"));
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_series_csv(std::ostream& out, const MatrixSeries& series) {
  out << "t,i,j,value\n";
  for (std::size_t t = 0; t < series.length(); ++t) {
    const Matrix& y = series[t];
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      for (Eigen::Index j = 0; j < y.cols(); ++j) {
        out << t + 1 << ',' << i + 1 << ',' << j + 1 << ',' << format_double(y(i, j)) << '\n';
      }
    }
  }
}

MatrixSeries read_series_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::tuple<long, long, long, double, std::size_t>> cells;
  long t_max = 0;
  long p_max = 0;
  long q_max = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    if (!have_header) {
      if (row != "t,i,j,value") {
        throw DataError(line_error(line_no, "expected header 't,i,j,value'"));
      }
      have_header = true;
      continue;
    }
    std::string_view parts[4];
    std::size_t start = 0;
    int n = 0;
    while (true) {
      const auto comma = row.find(',', start);
      if (n == 4) {
        n = 5;
        break;
      }
      parts[n++] = row.substr(start, comma == std::string_view::npos ? row.size() - start
                                                                     : comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (n != 4) {
      throw DataError(line_error(line_no, "expected 4 fields"));
    }
    const long t = parse_index(parts[0], line_no, "t");
    const long i = parse_index(parts[1], line_no, "i");
    const long j = parse_index(parts[2], line_no, "j");
    const double v = parse_value(parts[3], line_no);
    t_max = std::max(t_max, t);
    p_max = std::max(p_max, i);
    q_max = std::max(q_max, j);
    cells.emplace_back(t, i, j, v, line_no);
  }
  if (!have_header) throw DataError("empty series file");
  if (cells.empty()) throw DataError("series file has no data rows");

  const auto t_len = static_cast<std::size_t>(t_max);
  std::vector<Matrix> frames(t_len, Matrix::Zero(p_max, q_max));
  std::vector<std::vector<std::size_t>> seen(t_len, std::vector<std::size_t>(
                                                        static_cast<std::size_t>(p_max * q_max), 0));
  for (const auto& [t, i, j, v, ln] : cells) {
    auto& slot = seen[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>((i - 1) * q_max + j - 1)];
    if (slot != 0) {
      throw DataError(line_error(ln, "duplicate cell (t,i,j)=(" + std::to_string(t) + "," +
                                         std::to_string(i) + "," + std::to_string(j) +
                                         "), first seen on line " + std::to_string(slot)));
    }
    slot = ln;
    frames[static_cast<std::size_t>(t - 1)](i - 1, j - 1) = v;
  }
  for (std::size_t t = 0; t < t_len; ++t) {
    for (long i = 0; i < p_max; ++i) {
      for (long j = 0; j < q_max; ++j) {
        if (seen[t][static_cast<std::size_t>(i * q_max + j)] == 0) {
          throw DataError("missing cell (t,i,j)=(" + std::to_string(t + 1) + "," +
                          std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        }
      }
    }
  }
  return MatrixSeries(std::move(frames));
}

void save_series(const std::filesystem::path& path, const MatrixSeries& series) {
  std::ostringstream out;
  write_series_csv(out, series);
  write_file_atomic(path, out.str());
}

MatrixSeries load_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_series_csv(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::random_device rd;
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw DataError("failed writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw UsageError("CsvTable: row has " + std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k > 0) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

std::string matrix_csv(const Matrix& m, const std::string& row_label) {
  std::vector<std::string> header{row_label};
  for (Eigen::Index j = 0; j < m.cols(); ++j) header.push_back("c" + std::to_string(j + 1));
  CsvTable table(std::move(header));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> cells{std::to_string(i + 1)};
    for (Eigen::Index j = 0; j < m.cols(); ++j) cells.push_back(format_double(m(i, j)));
    table.add_row(std::move(cells));
  }
  return table.str();
}

}  // namespace mefm::io
