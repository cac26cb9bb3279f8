#pragma once

#include "sketchbound/bounds.hpp"
#include "sketchbound/linalg.hpp"
#include "sketchbound/parallel.hpp"
#include "sketchbound/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace sketchbound {

/// Diagonal of M(t): k leading entries t followed by n - k ones.
Spectrum worst_case_matrix(Dim n, Dim k, double t);

/// Row split of an n x (k+p) test matrix G = [G1; G2] with G1 = U [Sigma 0] V^T
/// and G2 V = [X1 X2].
struct WorstCaseDecomposition {
  Matrix u;        // k x k
  Spectrum sigma;  // k singular values of G1
  Matrix v;        // (k+p) x (k+p)
  Matrix x1;       // (n-k) x k
  Matrix x2;       // (n-k) x p
};

WorstCaseDecomposition decompose_test_matrix(const Matrix& g, Dim k);

/// W(D) = || f(D, X2) [X1 Sigma^{-1}  I] || for explicit draws. With no tail
/// (D = I) this is sqrt(1 + ||(I - Q2 Q2^T) X1 Sigma^{-1}||^2), or 0 when X2
/// already spans all n - k coordinates.
double worst_case_error_from_parts(const Matrix& x1, const Matrix& x2, const Spectrum& sigma,
                                   const std::optional<Spectrum>& tail = std::nullopt);

/// L = f(I, X2) X1 Sigma^{-1}; ||L|| <= W <= ||L|| + 1.
double worst_case_l_norm(const Matrix& x1, const Matrix& x2, const Spectrum& sigma);

/// One draw of W: X1, X2 and the (k+p) x k Gaussian behind Sigma are sampled
/// from rng in that order. Cost O(n (k+p)^2).
double sample_worst_case_error(Dim n, Dim k, Dim p, const std::optional<Spectrum>& tail,
                               RngStream& rng);

/// One draw of W with the unit tail, sampled through Bartlett factors:
/// ||(I - Q2 Q2^T) X1 Sigma^{-1}|| has the law of ||R_Y R_G^{-1}|| with R_Y the
/// R factor of an (n-k-p) x k Gaussian and R_G that of a (k+p) x k Gaussian.
/// Cost is independent of n; each Lanczos step is O(k^2).
double sample_worst_case_error_bartlett(Dim n, Dim k, Dim p, RngStream& rng);

enum class WSampler { Auto, Direct, Bartlett };

const char* to_string(WSampler s);
WSampler parse_w_sampler(const std::string& name);

/// Work (n-k)(k+p)^2 above which Auto switches to the Bartlett sampler.
inline constexpr double kDirectSamplerWorkLimit = 5e7;

/// Sampler Auto resolves to for these parameters.
WSampler resolve_sampler(WSampler requested, Dim n, Dim k, Dim p, bool unit_tail);

struct WSampleOptions {
  WSampler sampler = WSampler::Auto;
  Execution exec = Execution::Parallel;
  std::optional<Spectrum> tail;
};

struct WSampleBatch {
  Dim n = 0, k = 0, p = 0;
  std::optional<Spectrum> tail;
  std::vector<double> draws;
  std::vector<std::uint64_t> seeds;
  MCEstimate summary;
  double min = 0.0;
  double max = 0.0;
  WSampler sampler = WSampler::Direct;
};

/// Independent draws of W, one derived RNG stream per trial.
WSampleBatch estimate_expected_W(Dim n, Dim k, Dim p, std::size_t trials, std::uint64_t seed,
                                 const WSampleOptions& opts = {});

/// trial,seed,W
void write_w_batch_csv(std::ostream& out, const WSampleBatch& batch);
nlohmann::json w_batch_summary_json(const WSampleBatch& batch);

struct LimitCheck {
  double direct = 0.0;  // ||f(M(t), G)|| from the range finder
  double via_w = 0.0;   // W evaluated on the decomposition of the same G
};

/// Draws one G from seed and evaluates both sides of the t -> infinity
/// identity. Dense path, so n is capped at 4000.
LimitCheck limit_residual_check(Dim n, Dim k, Dim p, double t, std::uint64_t seed);

inline constexpr Dim kDenseLimitCheckMaxN = 4000;

}  // namespace sketchbound
