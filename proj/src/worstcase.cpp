#include "sketchbound/worstcase.hpp"

#include "sketchbound/format.hpp"
#include "sketchbound/rangefinder.hpp"
#include "sketchbound/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

namespace sketchbound {

namespace {

void require_wc_dims(Dim n, Dim k, Dim p) {
  if (k < 1 || n <= k || p < 0 || k + p > n) {
    throw SketchError(ErrorKind::InvalidDims, "need n > k >= 1, p >= 0 and k + p <= n (n=" +
                                                  std::to_string(n) + ", k=" + std::to_string(k) +
                                                  ", p=" + std::to_string(p) + ")");
  }
}

bool is_unit_tail(const std::optional<Spectrum>& tail) {
  if (!tail) return true;
  return std::all_of(tail->values().begin(), tail->values().end(), [](double v) { return v == 1.0; });
}

Matrix scale_columns_by_inverse(const Matrix& x1, const Spectrum& sigma) {
  if (static_cast<Index>(sigma.size()) != x1.cols()) {
    throw SketchError(ErrorKind::DimensionMismatch, "Sigma length must match X1 columns");
  }
  const Vector inv = sigma.as_vector().cwiseInverse();
  return x1 * inv.asDiagonal();
}

Spectrum sample_sigma(Dim k, Dim p, RngStream& rng) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    Spectrum s = singular_values(gaussian_matrix(k + p, k, rng));
    if (s[s.size() - 1] > kRankTolerance * s.largest()) return s;
  }
  throw SketchError(ErrorKind::RankDeficient, "singular Sigma draw (retried once)");
}

}  // namespace

Spectrum worst_case_matrix(Dim n, Dim k, double t) {
  if (k < 1 || k >= n) throw SketchError(ErrorKind::InvalidDims, "worst-case matrix needs 1 <= k < n");
  if (!(t >= 1.0) || !std::isfinite(t)) throw SketchError(ErrorKind::InvalidDims, "t must be finite and >= 1");
  std::vector<double> diag(static_cast<std::size_t>(n), 1.0);
  std::fill_n(diag.begin(), k, t);
  return Spectrum(std::move(diag));
}

WorstCaseDecomposition decompose_test_matrix(const Matrix& g, Dim k) {
  const Index n = g.rows();
  const Index width = g.cols();
  if (k < 1 || n <= k || width < k) {
    throw SketchError(ErrorKind::InvalidDims, "decomposition needs n > k and at least k columns");
  }
  const Matrix g1 = g.topRows(k);
  const SvdResult f = svd(g1, SvdVectors::Full);
  const Vector& s = f.s;
  if (s(k - 1) <= kRankTolerance * s(0)) {
    throw SketchError(ErrorKind::RankDeficient, "top k rows of G are rank deficient");
  }

  WorstCaseDecomposition d;
  d.u = f.u;
  d.sigma = Spectrum(std::vector<double>(s.data(), s.data() + s.size()));
  d.v = f.v;
  const Matrix g2v = g.bottomRows(n - k) * d.v;
  d.x1 = g2v.leftCols(k);
  d.x2 = g2v.rightCols(width - k);
  return d;
}

double worst_case_l_norm(const Matrix& x1, const Matrix& x2, const Spectrum& sigma) {
  const Matrix q2 = range_basis(x2);
  const Matrix l = project_out(q2, scale_columns_by_inverse(x1, sigma));
  return spectral_norm(l).value;
}

double worst_case_error_from_parts(const Matrix& x1, const Matrix& x2, const Spectrum& sigma,
                                   const std::optional<Spectrum>& tail) {
  const Index rows = x1.rows();
  if (x2.rows() != rows) throw SketchError(ErrorKind::DimensionMismatch, "X1 and X2 row counts differ");
  if (tail && static_cast<Index>(tail->size()) != rows) {
    throw SketchError(ErrorKind::DimensionMismatch, "tail length must be n - k");
  }

  if (is_unit_tail(tail)) {
    const Matrix q2 = range_basis(x2);
    if (q2.cols() >= rows) return 0.0;  // f(I, X2) = 0
    const Matrix l = project_out(q2, scale_columns_by_inverse(x1, sigma));
    const double ln = spectral_norm(l).value;
    return std::sqrt(1.0 + ln * ln);
  }

  // General tail: the (n-k) x n operator [P D X1 Sigma^{-1}, P D], P = I - Q2 Q2^T.
  const Vector d = tail->as_vector();
  auto q2 = std::make_shared<const Matrix>(range_basis(d.asDiagonal() * x2));
  auto b = std::make_shared<const Matrix>(scale_columns_by_inverse(x1, sigma));
  auto dd = std::make_shared<const Vector>(d);
  const Index k = x1.cols();

  LinearOperator op;
  op.rows = rows;
  op.cols = k + rows;
  op.apply = [=](const Matrix& x) -> Matrix {
    const Matrix y = dd->asDiagonal() * ((*b) * x.topRows(k) + x.bottomRows(rows));
    return project_out(*q2, y);
  };
  op.apply_adjoint = [=](const Matrix& y) -> Matrix {
    const Matrix z = dd->asDiagonal() * project_out(*q2, y);
    Matrix out(k + rows, y.cols());
    out.topRows(k) = b->transpose() * z;
    out.bottomRows(rows) = z;
    return out;
  };
  return spectral_norm(op).value;
}

double sample_worst_case_error(Dim n, Dim k, Dim p, const std::optional<Spectrum>& tail,
                               RngStream& rng) {
  require_wc_dims(n, k, p);
  if (tail && static_cast<Dim>(tail->size()) != n - k) {
    throw SketchError(ErrorKind::InvalidDims, "tail length must be n - k");
  }
  const Matrix x1 = gaussian_matrix(n - k, k, rng);
  const Matrix x2 = gaussian_matrix(n - k, p, rng);
  const Spectrum sigma = sample_sigma(k, p, rng);
  return worst_case_error_from_parts(x1, x2, sigma, tail);
}

double sample_worst_case_error_bartlett(Dim n, Dim k, Dim p, RngStream& rng) {
  require_wc_dims(n, k, p);
  const Dim d = n - k - p;
  if (d == 0) return 0.0;

  auto ry = std::make_shared<const Matrix>(bartlett_factor(d, k, rng));
  auto rg = std::make_shared<const Matrix>(bartlett_factor(k + p, k, rng));
  if (rg->diagonal().minCoeff() <= 0.0) {
    throw SketchError(ErrorKind::RankDeficient, "singular Sigma draw");
  }

  LinearOperator op;
  op.rows = ry->rows();
  op.cols = k;
  op.apply = [ry, rg](const Matrix& x) -> Matrix {
    return (*ry) * rg->triangularView<Eigen::Upper>().solve(x);
  };
  op.apply_adjoint = [ry, rg](const Matrix& y) -> Matrix {
    return rg->transpose().triangularView<Eigen::Lower>().solve(ry->transpose() * y);
  };
  const double ln = spectral_norm(op).value;
  return std::sqrt(1.0 + ln * ln);
}

const char* to_string(WSampler s) {
  switch (s) {
    case WSampler::Auto: return "auto";
    case WSampler::Direct: return "direct";
    case WSampler::Bartlett: return "bartlett";
  }
  return "unknown";
}

WSampler parse_w_sampler(const std::string& name) {
  if (name == "auto") return WSampler::Auto;
  if (name == "direct") return WSampler::Direct;
  if (name == "bartlett") return WSampler::Bartlett;
  throw SketchError(ErrorKind::Parse, "unknown W sampler '" + name + "' (auto|direct|bartlett)");
}

WSampler resolve_sampler(WSampler requested, Dim n, Dim k, Dim p, bool unit_tail) {
  if (requested == WSampler::Bartlett && !unit_tail) {
    throw SketchError(ErrorKind::InvalidDims, "Bartlett sampler only covers the unit tail");
  }
  if (requested != WSampler::Auto) return requested;
  if (!unit_tail) return WSampler::Direct;
  const double work = static_cast<double>(n - k) * static_cast<double>(k + p) * static_cast<double>(k + p);
  return work > kDirectSamplerWorkLimit ? WSampler::Bartlett : WSampler::Direct;
}

WSampleBatch estimate_expected_W(Dim n, Dim k, Dim p, std::size_t trials, std::uint64_t seed,
                                 const WSampleOptions& opts) {
  require_wc_dims(n, k, p);
  if (trials < 2) throw SketchError(ErrorKind::InvalidDims, "need at least 2 trials");
  if (opts.tail && static_cast<Dim>(opts.tail->size()) != n - k) {
    throw SketchError(ErrorKind::InvalidDims, "tail length must be n - k");
  }

  WSampleBatch batch;
  batch.n = n;
  batch.k = k;
  batch.p = p;
  batch.tail = opts.tail;
  const bool unit = is_unit_tail(opts.tail);
  batch.sampler = resolve_sampler(opts.sampler, n, k, p, unit);

  batch.seeds.resize(trials);
  for (std::size_t i = 0; i < trials; ++i) batch.seeds[i] = derive_seed(seed, i);

  const auto& seeds = batch.seeds;
  const WSampler sampler = batch.sampler;
  const std::optional<Spectrum> tail = unit ? std::nullopt : opts.tail;
  batch.draws = run_trials(
      trials,
      [&](std::size_t i) {
        RngStream rng(seeds[i]);
        return sampler == WSampler::Bartlett ? sample_worst_case_error_bartlett(n, k, p, rng)
                                             : sample_worst_case_error(n, k, p, tail, rng);
      },
      opts.exec);

  batch.summary = summarize(batch.draws);
  const auto [mn, mx] = std::minmax_element(batch.draws.begin(), batch.draws.end());
  batch.min = *mn;
  batch.max = *mx;
  return batch;
}

void write_w_batch_csv(std::ostream& out, const WSampleBatch& batch) {
  out << "trial,seed,W\n";
  for (std::size_t i = 0; i < batch.draws.size(); ++i) {
    out << i << ',' << batch.seeds[i] << ',' << format_double(batch.draws[i]) << '\n';
  }
}

nlohmann::json w_batch_summary_json(const WSampleBatch& batch) {
  return {
      {"n", batch.n},
      {"k", batch.k},
      {"p", batch.p},
      {"tail", batch.tail ? nlohmann::json("file") : nlohmann::json("ones")},
      {"sampler", to_string(batch.sampler)},
      {"trials", batch.summary.trials},
      {"mean", batch.summary.mean},
      {"std", batch.summary.std},
      {"ci_half_width", batch.summary.ci_half_width},
      {"ci_convention", "3 standard errors"},
      {"min", batch.min},
      {"max", batch.max},
  };
}

LimitCheck limit_residual_check(Dim n, Dim k, Dim p, double t, std::uint64_t seed) {
  require_wc_dims(n, k, p);
  if (n > kDenseLimitCheckMaxN) {
    throw SketchError(ErrorKind::InvalidDims, "limit check is dense; n must be <= 4000");
  }
  const Spectrum m_t = worst_case_matrix(n, k, t);
  SketchConfig cfg{k, p, 0, seed};
  const Matrix g = draw_test_matrix(n, cfg);

  LimitCheck out;
  out.direct = range_finder_with(LinearOperator::diagonal(m_t), g, cfg, m_t).residual_spectral;
  const WorstCaseDecomposition d = decompose_test_matrix(g, k);
  out.via_w = worst_case_error_from_parts(d.x1, d.x2, d.sigma);
  return out;
}

}  // namespace sketchbound
