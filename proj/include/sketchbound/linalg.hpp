#pragma once

#include "sketchbound/matrix.hpp"
#include "sketchbound/rng.hpp"

#include <functional>

namespace sketchbound {

/// Relative pivot threshold below which a sketch column counts as dependent.
inline constexpr double kRankTolerance = 1e-12;

/// A linear map known only through block products with it and its adjoint.
/// The dense and diagonal factories capture their data by value.
struct LinearOperator {
  Index rows = 0;
  Index cols = 0;
  std::function<Matrix(const Matrix&)> apply;          // (cols x b) -> (rows x b)
  std::function<Matrix(const Matrix&)> apply_adjoint;  // (rows x b) -> (cols x b)

  static LinearOperator dense(Matrix a);
  /// rows x cols matrix with `diag` on its main diagonal (zero padded).
  static LinearOperator diagonal(const Vector& diag, Index rows, Index cols);
  static LinearOperator diagonal(const Spectrum& diag);

  /// Materializes the operator; only sensible for small dimensions.
  Matrix to_dense() const;
};

/// i.i.d. N(0,1) entries, drawn in column-major order.
Matrix gaussian_matrix(Index rows, Index cols, RngStream& rng);

/// Orthonormal basis for range(h) via column-pivoted Householder QR.
/// Throws RankDeficient when the numerical rank is below h.cols().
Matrix orthonormal_basis(const Matrix& h);

/// Like orthonormal_basis, but returns only as many columns as the numerical
/// rank of h (possibly zero) instead of failing.
Matrix range_basis(const Matrix& h, double rel_tol = kRankTolerance);

/// (I - Q Q^T) a.
Matrix project_out(const Matrix& q, const Matrix& a);

/// f(A, G) = (I - Q Q^T) A with Q spanning range(A G). A rank-deficient
/// sketch uses the reduced-width basis of its numerical range.
Matrix residual_project(const Matrix& a, const Matrix& g);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
};

struct NormOptions {
  double rel_tol = 1e-10;
  int max_iterations = 10000;
  std::uint64_t start_seed = 0x5eed0f5bec7a1ULL;
};

/// Largest singular value by Golub-Kahan-Lanczos bidiagonalization (a Krylov
/// accelerated power iteration on A^T A) with full reorthogonalization.
/// The start vector is a seeded Gaussian, so results are reproducible.
NormEstimate spectral_norm(const LinearOperator& op, const NormOptions& opts = {});
NormEstimate spectral_norm(const Matrix& a, const NormOptions& opts = {});

/// All min(rows, cols) singular values, non-increasing.
Spectrum singular_values(const Matrix& a);

enum class SvdVectors { Thin, Full };

/// a = u diag(s) v^T with s non-increasing (LAPACK dgesvd). Thin: u is
/// m x r, v is n x r with r = min(m, n); Full: both square.
struct SvdResult {
  Matrix u;
  Vector s;
  Matrix v;
};

SvdResult svd(const Matrix& a, SvdVectors vectors = SvdVectors::Thin);

struct PolarFactor {
  Matrix q;  // U V^T from the thin SVD
  Matrix e;  // a - q
};

/// Closest matrix with orthonormal columns and the same range.
/// Throws RankDeficient when a lacks full column rank.
PolarFactor polar_orthonormal(const Matrix& a);

/// Upper-trapezoidal min(rows, cols) x cols matrix distributed as the R
/// factor of the thin QR of a rows x cols standard Gaussian matrix (Bartlett):
/// R(i,i) ~ chi_{rows-i}, R(i,j) ~ N(0,1) for j > i. Same singular values as
/// the Gaussian matrix at O(cols^2) sampling cost.
Matrix bartlett_factor(Index rows, Index cols, RngStream& rng);

/// x -> r^{-1} x for a square, nonsingular upper-triangular r.
LinearOperator upper_triangular_inverse(Matrix r);

/// Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix).
Matrix random_orthogonal(Index n, RngStream& rng);

}  // namespace sketchbound
