#pragma once

// Field snapshots: columnar text (x, ybar, T) and a binary block with a
// 16-byte magic, a format version and little-endian doubles.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "filmheat/error.hpp"
#include "filmheat/fourier.hpp"

namespace filmheat {

inline constexpr std::array<char, 16> snapshot_magic{'F', 'I', 'L', 'M', 'H', 'E', 'A', 'T',
                                                     '-', 'S', 'N', 'A', 'P', '\0', '\0', '\0'};
inline constexpr std::uint32_t snapshot_version = 1;

/// A header line and whitespace-free numeric columns, tab separated.
class ColumnTable {
 public:
  explicit ColumnTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw UsageError("ColumnTable: at least one column required");
  }

  void add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw UsageError("ColumnTable: row width mismatch");
    rows_.push_back(cells);
  }

  void add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format(v));
    add_row(cells);
  }

  [[nodiscard]] std::size_t rows() const { return rows_.size(); }
  [[nodiscard]] const std::vector<std::string>& columns() const { return columns_; }

  void write(std::ostream& os) const {
    write_line(os, columns_);
    for (const auto& r : rows_) write_line(os, r);
  }

  void save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path + "'");
    write(f);
    if (!f) throw IoError("write failed for '" + path + "'");
  }

  /// Shortest text that reads back to the same double.
  static std::string format(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "\t" : "") << cells[i];
    os << '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Reads a table written by ColumnTable: header names plus numeric rows.
struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::size_t index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw UsageError("NumericTable: no column '" + name + "'");
  }
};

inline NumericTable read_numeric_table(std::istream& is) {
  NumericTable t;
  std::string line;
  if (!std::getline(is, line)) throw IoError("read_numeric_table: empty input");
  {
    std::istringstream ss(line);
    std::string c;
    while (std::getline(ss, c, '\t')) t.columns.push_back(c);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string c;
    std::vector<double> row;
    while (std::getline(ss, c, '\t')) row.push_back(std::stod(c));
    if (row.size() != t.columns.size()) throw IoError("read_numeric_table: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Text form: one row per node, columns x, ybar, T.
inline void write_field_text(std::ostream& os, const TemperatureField2D& f) {
  ColumnTable table({"x", "ybar", "T"});
  for (Eigen::Index i = 0; i < f.T.rows(); ++i)
    for (Eigen::Index j = 0; j < f.T.cols(); ++j) table.add_row({f.x[i], f.ybar[j], f.T(i, j)});
  table.write(os);
}

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("snapshot: truncated block");
  return v;
}

inline void put_array(std::ostream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

inline void get_array(std::istream& is, double* p, std::size_t n) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw IoError("snapshot: truncated block");
}

}  // namespace detail

/// Layout: magic[16], u32 version, u32 reserved, u64 nx, u64 ny, f64 t,
/// x[nx], ybar[ny], h[nx], q[nx], T[nx*ny] column-major.
inline void write_field_binary(std::ostream& os, const TemperatureField2D& f) {
  const auto nx = static_cast<std::uint64_t>(f.T.rows());
  const auto ny = static_cast<std::uint64_t>(f.T.cols());
  if (static_cast<std::uint64_t>(f.x.size()) != nx || static_cast<std::uint64_t>(f.h.size()) != nx ||
      static_cast<std::uint64_t>(f.q.size()) != nx || static_cast<std::uint64_t>(f.ybar.size()) != ny)
    throw UsageError("write_field_binary: inconsistent field dimensions");
  os.write(snapshot_magic.data(), snapshot_magic.size());
  detail::put<std::uint32_t>(os, snapshot_version);
  detail::put<std::uint32_t>(os, 0);
  detail::put<std::uint64_t>(os, nx);
  detail::put<std::uint64_t>(os, ny);
  detail::put<double>(os, f.t);
  detail::put_array(os, f.x.data(), nx);
  detail::put_array(os, f.ybar.data(), ny);
  detail::put_array(os, f.h.data(), nx);
  detail::put_array(os, f.q.data(), nx);
  detail::put_array(os, f.T.data(), nx * ny);
  if (!os) throw IoError("write_field_binary: stream error");
}

inline TemperatureField2D read_field_binary(std::istream& is) {
  std::array<char, 16> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != snapshot_magic) throw IoError("snapshot: bad magic");
  const auto version = detail::get<std::uint32_t>(is);
  if (version != snapshot_version)
    throw IoError("snapshot: unsupported version " + std::to_string(version));
  (void)detail::get<std::uint32_t>(is);
  const auto nx = detail::get<std::uint64_t>(is);
  const auto ny = detail::get<std::uint64_t>(is);
  if (nx == 0 || ny == 0 || nx > (1ULL << 24) || ny > (1ULL << 16))
    throw IoError("snapshot: implausible dimensions");
  TemperatureField2D f;
  f.t = detail::get<double>(is);
  f.x.resize(static_cast<Eigen::Index>(nx));
  f.ybar.resize(static_cast<Eigen::Index>(ny));
  f.h.resize(static_cast<Eigen::Index>(nx));
  f.q.resize(static_cast<Eigen::Index>(nx));
  f.T.resize(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
  detail::get_array(is, f.x.data(), nx);
  detail::get_array(is, f.ybar.data(), ny);
  detail::get_array(is, f.h.data(), nx);
  detail::get_array(is, f.q.data(), nx);
  detail::get_array(is, f.T.data(), nx * ny);
  return f;
}

inline void save_field_binary(const std::string& path, const TemperatureField2D& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path + "'");
  write_field_binary(os, f);
}

inline TemperatureField2D load_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read '" + path + "'");
  return read_field_binary(is);
}

}  // namespace filmheat
