#include "sketchbound/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sketchbound {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::InvalidOversampling: return "InvalidOversampling";
    case ErrorKind::InvalidDims: return "InvalidDims";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw SketchError(ErrorKind::NonFinite, std::string(what) + " has NaN or Inf entries");
  }
}

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw SketchError(ErrorKind::InvalidDims, "spectrum entries must be finite and nonnegative");
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw SketchError(ErrorKind::InvalidDims, "spectrum must be non-increasing");
    }
  }
}

Spectrum Spectrum::from_unsorted(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  return Spectrum(std::move(values));
}

Spectrum Spectrum::constant(std::size_t size, double value) {
  return Spectrum(std::vector<double>(size, value));
}

double Spectrum::tail_frobenius(std::size_t from) const {
  double sum = 0.0;
  for (std::size_t i = from; i < values_.size(); ++i) sum += values_[i] * values_[i];
  return std::sqrt(sum);
}

Vector Spectrum::as_vector() const {
  return Eigen::Map<const Vector>(values_.data(), static_cast<Index>(values_.size()));
}

Matrix Spectrum::as_diagonal() const { return as_vector().asDiagonal(); }

}  // namespace sketchbound
