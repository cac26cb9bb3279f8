#include "sketchbound/rangefinder.hpp"

#include "sketchbound/rng.hpp"

#include <cmath>
#include <limits>

namespace sketchbound {

namespace {

constexpr double kOverflowNorm = 1e300;
// Thresholds deciding "exactly zero" for the ratio convention.
constexpr double kZeroSigmaRel = 1e-12;
constexpr double kZeroResidualRel = 1e-9;

bool has_huge_column(const Matrix& h) {
  for (Index j = 0; j < h.cols(); ++j) {
    if (!(h.col(j).norm() <= kOverflowNorm)) return true;
  }
  return false;
}

void check_sketch(const Matrix& h, FactorizationResult& out) {
  if (!h.allFinite()) {
    throw SketchError(ErrorKind::Overflow, "sketch overflowed to non-finite values");
  }
  if (has_huge_column(h) && !out.overflow) {
    out.overflow = true;
    out.notes.emplace_back("sketch column norms exceeded 1e300 before re-orthonormalization");
  }
}

}  // namespace

void SketchConfig::validate(Index m, Index n) const {
  if (k < 1) throw SketchError(ErrorKind::InvalidDims, "k must be >= 1");
  if (p < 0) throw SketchError(ErrorKind::InvalidOversampling, "p must be >= 0");
  if (q < 0) throw SketchError(ErrorKind::InvalidDims, "q must be >= 0");
  if (width() > std::min<Dim>(m, n)) {
    throw SketchError(ErrorKind::InvalidDims, "k + p = " + std::to_string(width()) +
                                                  " exceeds min(m, n) = " +
                                                  std::to_string(std::min<Dim>(m, n)));
  }
}

Matrix draw_test_matrix(Index n, const SketchConfig& cfg) {
  RngStream rng(cfg.seed);
  return gaussian_matrix(n, cfg.width(), rng);
}

FactorizationResult range_finder_with(const LinearOperator& op, const Matrix& g,
                                      const SketchConfig& cfg, std::optional<Spectrum> spectrum) {
  cfg.validate(op.rows, op.cols);
  if (g.rows() != op.cols || g.cols() != cfg.width()) {
    throw SketchError(ErrorKind::DimensionMismatch, "test matrix must be n x (k+p)");
  }

  FactorizationResult out;
  Matrix h = op.apply(g);
  out.products = 1;
  check_sketch(h, out);
  for (Dim i = 0; i < cfg.q; ++i) {
    const Matrix qh = range_basis(h);
    Matrix z = op.apply_adjoint(qh);
    check_sketch(z, out);
    h = op.apply(range_basis(z));
    check_sketch(h, out);
    out.products += 2;
  }
  if (cfg.q > 0) {
    out.notes.emplace_back("power sketch re-orthonormalized between each of the " +
                           std::to_string(out.products) + " products");
  }

  out.q = range_basis(h);
  out.basis_width = out.q.cols();
  if (out.basis_width < cfg.width()) {
    out.reduced_basis = true;
    out.notes.emplace_back("rank-deficient sketch: basis reduced to " +
                           std::to_string(out.basis_width) + " of " +
                           std::to_string(cfg.width()) + " columns");
  }
  out.c = op.apply_adjoint(out.q).transpose();

  const Matrix basis = out.q;
  LinearOperator residual;
  residual.rows = op.rows;
  residual.cols = op.cols;
  residual.apply = [&op, &basis](const Matrix& x) { return project_out(basis, op.apply(x)); };
  residual.apply_adjoint = [&op, &basis](const Matrix& y) {
    return op.apply_adjoint(project_out(basis, y));
  };
  const NormEstimate norm = spectral_norm(residual);
  out.residual_spectral = norm.value;
  out.residual_converged = norm.converged;
  if (!norm.converged) out.notes.emplace_back("residual norm iteration hit its cap");

  if (spectrum) {
    const auto k = static_cast<std::size_t>(cfg.k);
    if (spectrum->size() > k) out.sigma_kplus1 = (*spectrum)[k];
    else out.sigma_kplus1 = 0.0;
    out.input_spectrum = std::move(spectrum);
  }
  return out;
}

FactorizationResult range_finder(const Matrix& a, const SketchConfig& cfg) {
  require_finite(a, "input matrix");
  cfg.validate(a.rows(), a.cols());
  std::optional<Spectrum> spectrum;
  if (std::min(a.rows(), a.cols()) <= kDenseSpectrumLimit) spectrum = singular_values(a);
  return range_finder_with(LinearOperator::dense(a), draw_test_matrix(a.cols(), cfg), cfg,
                           std::move(spectrum));
}

FactorizationResult range_finder(const Spectrum& diag, const SketchConfig& cfg) {
  const auto n = static_cast<Index>(diag.size());
  cfg.validate(n, n);
  return range_finder_with(LinearOperator::diagonal(diag), draw_test_matrix(n, cfg), cfg, diag);
}

FactorizationResult randomized_svd(const Matrix& a, const SketchConfig& cfg) {
  FactorizationResult out = range_finder(a, cfg);
  SvdFactors f;
  if (out.c.rows() == 0) {
    f.u = Matrix::Zero(a.rows(), 0);
    f.v = Matrix::Zero(a.cols(), 0);
    out.svd = std::move(f);
    return out;
  }
  const SvdResult small = svd(out.c);
  f.u = out.q * small.u;
  f.s = Spectrum::from_unsorted(std::vector<double>(small.s.data(), small.s.data() + small.s.size()));
  f.v = small.v;
  out.svd = std::move(f);
  return out;
}

FactorizationResult power_range_finder(const Matrix& a, const SketchConfig& cfg) {
  if (cfg.q < 1) throw SketchError(ErrorKind::InvalidDims, "power range finder needs q >= 1");
  return range_finder(a, cfg);
}

FactorizationResult power_range_finder(const Spectrum& diag, const SketchConfig& cfg) {
  if (cfg.q < 1) throw SketchError(ErrorKind::InvalidDims, "power range finder needs q >= 1");
  return range_finder(diag, cfg);
}

ResidualReport residual_report(Index m, Index n, const FactorizationResult& result,
                               const SketchConfig& cfg, const ReportOptions& opts) {
  ResidualReport r;
  r.residual_spectral = result.residual_spectral;
  r.sigma_kplus1 = result.sigma_kplus1;
  r.config = cfg;
  r.m = m;
  r.n = n;
  r.notes = result.notes;

  if (result.input_spectrum) {
    const Spectrum& s = *result.input_spectrum;
    const auto k = static_cast<std::size_t>(cfg.k);
    r.frob_tail = s.tail_frobenius(k);
    const double scale = s.largest();
    const double sigma = r.sigma_kplus1.value_or(0.0);
    const bool sigma_zero = sigma <= kZeroSigmaRel * scale;
    const bool residual_zero = r.residual_spectral <= kZeroResidualRel * scale;
    if (sigma_zero && residual_zero) {
      r.ratio = 1.0;
      r.ratio_note = "1.0 by convention: sigma_{k+1} and residual both vanish";
    } else if (sigma_zero) {
      r.ratio = std::numeric_limits<double>::infinity();
      r.ratio_note = "infinite: sigma_{k+1} = 0 but residual > 0";
    } else {
      r.ratio = r.residual_spectral / sigma;
    }
  } else {
    r.notes.emplace_back("sigma_{k+1} not computed (min(m, n) above dense limit)");
  }

  if (opts.include_bounds) {
    r.bounds = bound_set(m, n, cfg.k, cfg.p, opts.bound_trials, derive_seed(cfg.seed, 0xb0u),
                         opts.source);
    if (result.input_spectrum && r.bounds->e_sigma_inv && cfg.p >= 2 &&
        result.input_spectrum->size() > static_cast<std::size_t>(cfg.k)) {
      r.mixed_norm = mixed_norm_bound(*result.input_spectrum, cfg.k, cfg.p, *r.bounds->e_sigma_inv);
    }
  }
  return r;
}

ResidualReport residual_report(const Matrix& a, const FactorizationResult& result,
                               const SketchConfig& cfg, const ReportOptions& opts) {
  if (result.input_spectrum || std::min(a.rows(), a.cols()) > kDenseSpectrumLimit) {
    return residual_report(a.rows(), a.cols(), result, cfg, opts);
  }
  FactorizationResult with_spectrum = result;
  with_spectrum.input_spectrum = singular_values(a);
  const auto k = static_cast<std::size_t>(cfg.k);
  with_spectrum.sigma_kplus1 =
      with_spectrum.input_spectrum->size() > k ? (*with_spectrum.input_spectrum)[k] : 0.0;
  return residual_report(a.rows(), a.cols(), with_spectrum, cfg, opts);
}

nlohmann::json to_json(const ResidualReport& report) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    if (!v) return nullptr;
    if (std::isinf(*v)) return "inf";
    return *v;
  };
  nlohmann::json j;
  j["residual_spectral"] = report.residual_spectral;
  j["sigma_k_plus_1"] = opt(report.sigma_kplus1);
  j["ratio"] = opt(report.ratio);
  if (!report.ratio_note.empty()) j["ratio_note"] = report.ratio_note;
  j["frob_tail"] = opt(report.frob_tail);
  j["mixed_norm_bound"] = opt(report.mixed_norm);
  j["bounds"] = report.bounds ? to_json(*report.bounds) : nlohmann::json::object();
  j["config"] = {{"k", report.config.k},
                 {"p", report.config.p},
                 {"q", report.config.q},
                 {"m", report.m},
                 {"n", report.n}};
  j["seed"] = report.config.seed;
  j["notes"] = report.notes;
  return j;
}

}  // namespace sketchbound
