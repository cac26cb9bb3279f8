#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchbound {

/// Dense real matrix, column-major. Carrier for A, G, Q, H and friends.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorKind {
  DimensionMismatch,
  RankDeficient,
  NoConvergence,
  InvalidOversampling,
  InvalidDims,
  Overflow,
  NonFinite,
  Io,
  Parse,
};

const char* to_string(ErrorKind kind);

class SketchError : public std::runtime_error {
 public:
  SketchError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what);

/// Non-increasing sequence of nonnegative reals. Stands for singular value
/// lists and for diagonal matrices such as the tail block D or M(t).
class Spectrum {
 public:
  Spectrum() = default;

  /// Validates ordering and sign; throws InvalidDims otherwise.
  explicit Spectrum(std::vector<double> values);

  /// Sorts into non-increasing order first. Negative input still throws.
  static Spectrum from_unsorted(std::vector<double> values);

  static Spectrum constant(std::size_t size, double value);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double largest() const { return values_.empty() ? 0.0 : values_.front(); }
  const std::vector<double>& values() const noexcept { return values_; }

  /// sqrt(sum_{i >= from} s_i^2), zero-based.
  double tail_frobenius(std::size_t from) const;

  Vector as_vector() const;
  Matrix as_diagonal() const;

 private:
  std::vector<double> values_;
};

}  // namespace sketchbound
