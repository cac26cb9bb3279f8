#pragma once

#include "sketchbound/matrix.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace sketchbound {

enum class MatrixFormat { Csv, Binary };

MatrixFormat parse_matrix_format(const std::string& name);

/// One row per line, comma separated decimals. Blank lines and lines starting
/// with '#' are skipped.
Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Matrix& a);

/// Little-endian "SKBM", u32 rows, u32 cols, rows*cols f64 in column-major order.
Matrix read_matrix_binary(std::istream& in);
void write_matrix_binary(std::ostream& out, const Matrix& a);

Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format);
void write_matrix(const std::filesystem::path& path, const Matrix& a, MatrixFormat format);

}  // namespace sketchbound
