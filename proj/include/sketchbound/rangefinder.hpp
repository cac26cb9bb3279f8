#pragma once

#include "sketchbound/bounds.hpp"
#include "sketchbound/linalg.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sketchbound {

/// Target rank k, oversampling p (sketch width l = k + p), power exponent q.
struct SketchConfig {
  Dim k = 1;
  Dim p = 0;
  Dim q = 0;
  std::uint64_t seed = 0;

  Dim width() const { return k + p; }
  /// Throws InvalidDims / InvalidOversampling when unusable for an m x n input.
  void validate(Index m, Index n) const;
};

struct SvdFactors {
  Matrix u;  // m x l
  Spectrum s;
  Matrix v;  // n x l
};

/// Output of the range finder family. B is always Q (b_is_q), C = Q^T A.
struct FactorizationResult {
  Matrix q;
  bool b_is_q = true;
  Matrix c;
  std::optional<SvdFactors> svd;

  double residual_spectral = 0.0;
  bool residual_converged = true;
  std::optional<double> sigma_kplus1;
  /// Full spectrum of A, when available (diagonal input, or dense SVD up to
  /// kDenseSpectrumLimit).
  std::optional<Spectrum> input_spectrum;

  Index basis_width = 0;
  bool reduced_basis = false;
  int products = 0;  // multiplications by A or A^T spent on the sketch
  bool overflow = false;
  std::vector<std::string> notes;
};

/// Above this min(m, n) the dense SVD of A is skipped.
inline constexpr Index kDenseSpectrumLimit = 4000;

/// Draws the n x (k+p) Gaussian test matrix for `cfg` (seeded by cfg.seed).
Matrix draw_test_matrix(Index n, const SketchConfig& cfg);

/// Randomized range finder: H = A G, Q = basis of range(H), C = Q^T A, and
/// the spectral norm of the residual (I - Q Q^T) A evaluated implicitly.
FactorizationResult range_finder(const Matrix& a, const SketchConfig& cfg);
/// Square diagonal input given by its entries; never forms the n x n matrix.
FactorizationResult range_finder(const Spectrum& diag, const SketchConfig& cfg);
/// Same, with a caller-supplied test matrix g (n x l). cfg.q selects the
/// power variant. `spectrum`, when given, is the known spectrum of op.
FactorizationResult range_finder_with(const LinearOperator& op, const Matrix& g,
                                      const SketchConfig& cfg,
                                      std::optional<Spectrum> spectrum = std::nullopt);

/// Range finder followed by an SVD of the small matrix C: A ~ U S V^T.
FactorizationResult randomized_svd(const Matrix& a, const SketchConfig& cfg);

/// Sketch with H = (A A^T)^q A G using 2q+1 products. The sketch is
/// re-orthonormalized after every product; the range is unchanged in exact
/// arithmetic but the columns no longer collapse onto the top singular vector.
FactorizationResult power_range_finder(const Matrix& a, const SketchConfig& cfg);
FactorizationResult power_range_finder(const Spectrum& diag, const SketchConfig& cfg);

struct ResidualReport {
  double residual_spectral = 0.0;
  std::optional<double> sigma_kplus1;
  /// residual / sigma_{k+1}; infinity when sigma_{k+1} = 0 < residual and 1
  /// by convention when both vanish.
  std::optional<double> ratio;
  std::string ratio_note;
  std::optional<double> frob_tail;
  std::optional<double> mixed_norm;
  std::optional<BoundSet> bounds;
  SketchConfig config;
  Index m = 0, n = 0;
  std::vector<std::string> notes;
};

struct ReportOptions {
  bool include_bounds = true;
  std::size_t bound_trials = kDefaultSigmaInvTrials;
  SigmaInvSource source = SigmaInvSource::MonteCarlo;
};

/// Uses the spectrum stored in `result` when present.
ResidualReport residual_report(Index m, Index n, const FactorizationResult& result,
                               const SketchConfig& cfg, const ReportOptions& opts = {});
/// Computes the spectrum of `a` if `result` lacks it and a is small enough.
ResidualReport residual_report(const Matrix& a, const FactorizationResult& result,
                               const SketchConfig& cfg, const ReportOptions& opts = {});

nlohmann::json to_json(const ResidualReport& report);

}  // namespace sketchbound
