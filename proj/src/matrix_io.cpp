#include "sketchbound/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace sketchbound {

static_assert(std::endian::native == std::endian::little,
              "binary matrix I/O assumes a little-endian host");

MatrixFormat parse_matrix_format(const std::string& name) {
  if (name == "csv") return MatrixFormat::Csv;
  if (name == "bin") return MatrixFormat::Binary;
  throw SketchError(ErrorKind::Parse, "unknown matrix format '" + name + "' (expected csv|bin)");
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw SketchError(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw SketchError(ErrorKind::Parse, "line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw SketchError(ErrorKind::Parse, "empty matrix");

  Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  require_finite(a, "CSV matrix");
  return a;
}

void write_matrix_csv(std::ostream& out, const Matrix& a) {
  out << std::setprecision(17);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) out << ',';
      out << a(i, j);
    }
    out << '\n';
  }
}

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'K', 'B', 'M'};

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw SketchError(ErrorKind::Parse, "truncated binary matrix");
  return value;
}

}  // namespace

Matrix read_matrix_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw SketchError(ErrorKind::Parse, "missing SKBM magic");
  const auto rows = read_pod<std::uint32_t>(in);
  const auto cols = read_pod<std::uint32_t>(in);
  if (rows == 0 || cols == 0) throw SketchError(ErrorKind::Parse, "zero-sized binary matrix");
  Matrix a(rows, cols);
  in.read(reinterpret_cast<char*>(a.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(a.size())));
  if (!in) throw SketchError(ErrorKind::Parse, "truncated binary matrix payload");
  require_finite(a, "binary matrix");
  return a;
}

void write_matrix_binary(std::ostream& out, const Matrix& a) {
  out.write(kMagic.data(), kMagic.size());
  const auto rows = static_cast<std::uint32_t>(a.rows());
  const auto cols = static_cast<std::uint32_t>(a.cols());
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(a.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(a.size())));
}

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path, format == MatrixFormat::Binary ? std::ios::binary : std::ios::in);
  if (!in) throw SketchError(ErrorKind::Io, "cannot open " + path.string());
  return format == MatrixFormat::Binary ? read_matrix_binary(in) : read_matrix_csv(in);
}

void write_matrix(const std::filesystem::path& path, const Matrix& a, MatrixFormat format) {
  std::ofstream out(path, format == MatrixFormat::Binary ? std::ios::binary : std::ios::out);
  if (!out) throw SketchError(ErrorKind::Io, "cannot write " + path.string());
  if (format == MatrixFormat::Binary) {
    write_matrix_binary(out, a);
  } else {
    write_matrix_csv(out, a);
  }
}

}  // namespace sketchbound
