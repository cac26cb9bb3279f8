#include "sketchbound/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>
#include <memory>

extern "C" void dgesvd_(const char* jobu, const char* jobvt, const int* m, const int* n, double* a,
                        const int* lda, double* s, double* u, const int* ldu, double* vt,
                        const int* ldvt, double* work, const int* lwork, int* info);

namespace sketchbound {

namespace {

int lapack_int(Index x) {
  if (x > std::numeric_limits<int>::max()) {
    throw SketchError(ErrorKind::InvalidDims, "matrix too large for LAPACK");
  }
  return static_cast<int>(x);
}

// Eigen 3.4.0's BDCSVD can return wrong values on rank-deficient input, so
// every dense SVD goes through dgesvd.
void run_dgesvd(char jobu, char jobvt, Matrix a, Vector& s, Matrix& u, Matrix& vt) {
  const int m = lapack_int(a.rows());
  const int n = lapack_int(a.cols());
  const int r = std::min(m, n);
  s.resize(r);
  const int ldu = std::max(1, m);
  const int ldvt = std::max(1, jobvt == 'A' ? n : r);
  u.resize(jobu == 'N' ? 1 : m, jobu == 'A' ? m : (jobu == 'N' ? 1 : r));
  vt.resize(jobvt == 'N' ? 1 : ldvt, jobvt == 'N' ? 1 : n);
  const int lda = std::max(1, m);
  int info = 0;
  int lwork = -1;
  double query = 0.0;
  dgesvd_(&jobu, &jobvt, &m, &n, a.data(), &lda, s.data(), u.data(), &ldu, vt.data(), &ldvt, &query,
          &lwork, &info);
  lwork = static_cast<int>(query);
  std::vector<double> work(static_cast<std::size_t>(std::max(lwork, 1)));
  dgesvd_(&jobu, &jobvt, &m, &n, a.data(), &lda, s.data(), u.data(), &ldu, vt.data(), &ldvt,
          work.data(), &lwork, &info);
  if (info != 0) {
    throw SketchError(ErrorKind::NoConvergence, "dgesvd failed (info=" + std::to_string(info) + ")");
  }
}

}  // namespace

LinearOperator LinearOperator::dense(Matrix a) {
  auto shared = std::make_shared<const Matrix>(std::move(a));
  LinearOperator op;
  op.rows = shared->rows();
  op.cols = shared->cols();
  op.apply = [shared](const Matrix& x) -> Matrix { return (*shared) * x; };
  op.apply_adjoint = [shared](const Matrix& y) -> Matrix { return shared->transpose() * y; };
  return op;
}

LinearOperator LinearOperator::diagonal(const Vector& diag, Index rows, Index cols) {
  if (diag.size() != std::min(rows, cols)) {
    throw SketchError(ErrorKind::DimensionMismatch, "diagonal length must equal min(rows, cols)");
  }
  auto d = std::make_shared<const Vector>(diag);
  LinearOperator op;
  op.rows = rows;
  op.cols = cols;
  op.apply = [d, rows](const Matrix& x) -> Matrix {
    Matrix y = Matrix::Zero(rows, x.cols());
    const Index r = d->size();
    y.topRows(r) = d->asDiagonal() * x.topRows(r);
    return y;
  };
  op.apply_adjoint = [d, cols](const Matrix& y) -> Matrix {
    Matrix x = Matrix::Zero(cols, y.cols());
    const Index r = d->size();
    x.topRows(r) = d->asDiagonal() * y.topRows(r);
    return x;
  };
  return op;
}

LinearOperator LinearOperator::diagonal(const Spectrum& diag) {
  const auto n = static_cast<Index>(diag.size());
  return diagonal(diag.as_vector(), n, n);
}

Matrix LinearOperator::to_dense() const { return apply(Matrix::Identity(cols, cols)); }

Matrix gaussian_matrix(Index rows, Index cols, RngStream& rng) {
  Matrix g(rows, cols);
  double* data = g.data();
  const Index count = rows * cols;
  for (Index i = 0; i < count; ++i) data[i] = rng.normal();
  return g;
}

Matrix range_basis(const Matrix& h, double rel_tol) {
  if (h.cols() == 0 || h.rows() == 0) return Matrix(h.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(h);
  qr.setThreshold(rel_tol);
  const Index rank = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(h.rows(), rank);
  return q;
}

Matrix orthonormal_basis(const Matrix& h) {
  if (h.cols() > h.rows()) {
    throw SketchError(ErrorKind::RankDeficient, "more columns than rows");
  }
  Matrix q = range_basis(h);
  if (q.cols() < h.cols()) {
    throw SketchError(ErrorKind::RankDeficient, "numerical rank " + std::to_string(q.cols()) +
                                                    " < " + std::to_string(h.cols()) + " columns");
  }
  return q;
}

Matrix project_out(const Matrix& q, const Matrix& a) {
  if (q.cols() == 0) return a;
  return a - q * (q.transpose() * a);
}

Matrix residual_project(const Matrix& a, const Matrix& g) {
  if (a.cols() != g.rows()) {
    throw SketchError(ErrorKind::DimensionMismatch,
                      "A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                          " but G has " + std::to_string(g.rows()) + " rows");
  }
  const Matrix q = range_basis(a * g);
  return project_out(q, a);
}

namespace {

// Largest singular triplet of the (j+1) x (j+1) upper bidiagonal matrix.
struct BidiagTop {
  double sigma;
  double last_left;  // last component of the top left singular vector
};

BidiagTop bidiagonal_top(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const auto size = static_cast<Index>(alpha.size());
  Matrix b = Matrix::Zero(size, size);
  for (Index i = 0; i < size; ++i) {
    b(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < size) b(i, i + 1) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU);
  return {svd.singularValues()(0), svd.matrixU()(size - 1, 0)};
}

// U^T A [V v_next] = [B, beta e_last]: its top singular value lies between
// that of B and ||A||, and equals ||A|| once U spans the range of A.
double augmented_top(const std::vector<double>& alpha, const std::vector<double>& beta, double b_next) {
  const auto size = static_cast<Index>(alpha.size());
  Matrix b = Matrix::Zero(size, size + 1);
  for (Index i = 0; i < size; ++i) {
    b(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < size) b(i, i + 1) = beta[static_cast<std::size_t>(i)];
  }
  b(size - 1, size) = b_next;
  return Eigen::JacobiSVD<Matrix>(b).singularValues()(0);
}

void reorthogonalize(const Matrix& basis, Index used, Vector& w) {
  if (used == 0) return;
  auto block = basis.leftCols(used);
  for (int pass = 0; pass < 2; ++pass) w -= block * (block.transpose() * w);
}

}  // namespace

NormEstimate spectral_norm(const LinearOperator& op, const NormOptions& opts) {
  if (op.rows <= 0 || op.cols <= 0) {
    throw SketchError(ErrorKind::InvalidDims, "operator dimensions must be positive");
  }
  const Index m = op.rows;
  const Index n = op.cols;
  const Index krylov_cap = std::min<Index>(std::min(m, n), opts.max_iterations);

  RngStream rng(derive_seed(opts.start_seed, static_cast<std::uint64_t>(m),
                            static_cast<std::uint64_t>(n)));
  Vector v = gaussian_matrix(n, 1, rng);
  v.normalize();

  Matrix vs(n, krylov_cap + 1);
  Matrix us(m, krylov_cap + 1);
  std::vector<double> alpha;
  std::vector<double> beta;

  vs.col(0) = v;
  Vector u = op.apply(v);
  double a0 = u.norm();
  if (a0 == 0.0 || !std::isfinite(a0)) {
    // A random start in the null space means A = 0 (almost surely).
    return {std::isfinite(a0) ? 0.0 : a0, 1, std::isfinite(a0)};
  }
  us.col(0) = u / a0;
  alpha.push_back(a0);

  NormEstimate est;
  for (Index j = 0;; ++j) {
    Vector w = op.apply_adjoint(us.col(j)) - alpha.back() * vs.col(j);
    reorthogonalize(vs, j + 1, w);
    const double bj = w.norm();

    const BidiagTop top = bidiagonal_top(alpha, beta);
    est.value = augmented_top(alpha, beta, bj);
    est.iterations = static_cast<int>(j + 1);
    const double residual = bj * std::abs(top.last_left);
    const double tiny = 1e-14 * std::max(top.sigma, 1e-300);
    if (residual <= opts.rel_tol * top.sigma || bj <= tiny || j + 1 >= std::min(m, n)) {
      est.converged = true;
      return est;
    }
    if (j + 1 >= krylov_cap) {
      est.converged = false;
      return est;
    }

    vs.col(j + 1) = w / bj;
    beta.push_back(bj);
    Vector next = op.apply(vs.col(j + 1)) - bj * us.col(j);
    reorthogonalize(us, j + 1, next);
    const double aj = next.norm();
    if (aj <= tiny) {
      // Invariant subspace: the bidiagonal with a zero last pivot is exact.
      alpha.push_back(0.0);
      est.value = bidiagonal_top(alpha, beta).sigma;
      est.iterations = static_cast<int>(j + 2);
      est.converged = true;
      return est;
    }
    us.col(j + 1) = next / aj;
    alpha.push_back(aj);
  }
}

NormEstimate spectral_norm(const Matrix& a, const NormOptions& opts) {
  if (a.size() == 0) throw SketchError(ErrorKind::InvalidDims, "empty matrix");
  auto shared = std::make_shared<const Matrix>(a);
  LinearOperator op;
  op.rows = a.rows();
  op.cols = a.cols();
  op.apply = [shared](const Matrix& x) -> Matrix { return (*shared) * x; };
  op.apply_adjoint = [shared](const Matrix& y) -> Matrix { return shared->transpose() * y; };
  return spectral_norm(op, opts);
}

Spectrum singular_values(const Matrix& a) {
  if (a.size() == 0) return Spectrum();
  require_finite(a, "svd input");
  Vector s;
  Matrix u, vt;
  run_dgesvd('N', 'N', a, s, u, vt);
  std::vector<double> values(s.data(), s.data() + s.size());
  return Spectrum::from_unsorted(std::move(values));
}

SvdResult svd(const Matrix& a, SvdVectors vectors) {
  if (a.size() == 0) throw SketchError(ErrorKind::InvalidDims, "empty matrix");
  require_finite(a, "svd input");
  const char job = vectors == SvdVectors::Full ? 'A' : 'S';
  SvdResult out;
  Matrix vt;
  run_dgesvd(job, job, a, out.s, out.u, vt);
  out.v = vt.transpose();
  return out;
}

PolarFactor polar_orthonormal(const Matrix& a) {
  if (a.cols() > a.rows() || a.size() == 0) {
    throw SketchError(ErrorKind::RankDeficient, "polar factor needs full column rank");
  }
  const SvdResult f = svd(a);
  const Vector& s = f.s;
  if (s(s.size() - 1) <= kRankTolerance * s(0)) {
    throw SketchError(ErrorKind::RankDeficient, "polar factor needs full column rank");
  }
  PolarFactor out;
  out.q = f.u * f.v.transpose();
  out.e = a - out.q;
  return out;
}

Matrix bartlett_factor(Index rows, Index cols, RngStream& rng) {
  const Index r = std::min(rows, cols);
  Matrix out = Matrix::Zero(r, cols);
  for (Index i = 0; i < r; ++i) {
    out(i, i) = rng.chi(static_cast<double>(rows - i));
    for (Index j = i + 1; j < cols; ++j) out(i, j) = rng.normal();
  }
  return out;
}

LinearOperator upper_triangular_inverse(Matrix r) {
  if (r.rows() != r.cols()) throw SketchError(ErrorKind::DimensionMismatch, "triangular factor must be square");
  auto shared = std::make_shared<const Matrix>(std::move(r));
  LinearOperator op;
  op.rows = shared->rows();
  op.cols = shared->cols();
  op.apply = [shared](const Matrix& x) -> Matrix {
    return shared->triangularView<Eigen::Upper>().solve(x);
  };
  op.apply_adjoint = [shared](const Matrix& y) -> Matrix {
    return shared->transpose().triangularView<Eigen::Lower>().solve(y);
  };
  return op;
}

Matrix random_orthogonal(Index n, RngStream& rng) {
  const Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace sketchbound
