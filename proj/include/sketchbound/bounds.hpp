#pragma once

#include "sketchbound/matrix.hpp"
#include "sketchbound/parallel.hpp"
#include "sketchbound/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace sketchbound {

// Dimensions are 64-bit: the closed forms are evaluated at n up to 1e9.
using Dim = std::int64_t;

/// Classical expected-error bound, in units of
/// sigma_{k+1}: 1 + 4 sqrt(k+p) / (p-1) * sqrt(min(m, n)). Needs p >= 2.
double bound_hmt(Dim m, Dim n, Dim k, Dim p);

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

/// Closed-form bracket for E||Sigma^{-1}||, Sigma the singular values of a
/// (k+p) x k Gaussian: [1/sqrt(p+1), e sqrt(k+p)/p]. Needs p >= 1.
Bracket sigma_inv_norm_bounds(Dim k, Dim p);

/// Mean of 1/sigma_min over `trials` draws of a (k+p) x k Gaussian.
MCEstimate estimate_sigma_inv_norm(Dim k, Dim p, std::size_t trials, std::uint64_t seed,
                                   Execution exec = Execution::Parallel);

/// Mean of ||Sigma^{-1}||_F^2 = trace(M^{-1}), M Wishart(I_k, k+p). Target k/(p-1).
MCEstimate estimate_sigma_inv_frob_sq(Dim k, Dim p, std::size_t trials, std::uint64_t seed,
                                      Execution exec = Execution::Parallel);

/// Upper end of the sandwich on E W: 1 + (sqrt(n-k) + sqrt(k)) e_sigma_inv.
double bound_sharp_upper(Dim n, Dim k, Dim p, double e_sigma_inv);
/// Lower end: sqrt(n - (k+p+2)) e_sigma_inv. Needs n >= k+p+3.
double bound_sharp_lower(Dim n, Dim k, Dim p, double e_sigma_inv);

/// sqrt(n) / (sqrt(k+p) - sqrt(k)), what E W is close to when k+p << n.
double error_proxy(Dim n, Dim k, Dim p);

/// Large-dimension almost-sure limits for W. Needs k+p < n and p >= 1.
Bracket asymptotic_bounds(Dim n, Dim k, Dim p);

/// (1 + sqrt(k/(p-1))) sigma_{k+1} + e_sigma_inv sqrt(sum_{i>k} sigma_i^2).
double mixed_norm_bound(const Spectrum& spectrum, Dim k, Dim p, double e_sigma_inv);

enum class SigmaInvSource { ClosedFormUpper, ClosedFormLower, MonteCarlo };

const char* to_string(SigmaInvSource source);
SigmaInvSource parse_sigma_inv_source(const std::string& name);

inline constexpr std::size_t kDefaultSigmaInvTrials = 1000;

/// Every bound for one (m, n, k, p), normalized by sigma_{k+1}. Fields whose
/// preconditions fail are left empty rather than aborting the whole record.
struct BoundSet {
  Dim m = 0, n = 0, k = 0, p = 0;
  std::optional<double> hmt_upper;
  std::optional<double> sharp_upper;
  std::optional<double> sharp_lower;
  std::optional<double> proxy;
  std::optional<double> asymptotic_upper;
  std::optional<double> asymptotic_lower;
  /// mixed_norm_bound for a flat unit tail of length min(m,n) - k.
  std::optional<double> mixed_norm_flat;
  std::optional<double> e_sigma_inv;
  double e_sigma_inv_ci = 0.0;
  SigmaInvSource e_sigma_inv_source = SigmaInvSource::MonteCarlo;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Throws InvalidDims unless k >= 1, p >= 0 and k + p <= min(m, n).
BoundSet bound_set(Dim m, Dim n, Dim k, Dim p, std::size_t trials, std::uint64_t seed,
                   SigmaInvSource source = SigmaInvSource::MonteCarlo,
                   Execution exec = Execution::Parallel);

nlohmann::json to_json(const BoundSet& b);

/// m,n,k,p,hmt,sharp_lo,sharp_hi,proxy,asym_lo,asym_hi,e_sigma_inv,ci,source,trials,seed
std::string bound_set_csv_header();
std::string bound_set_csv_row(const BoundSet& b);

}  // namespace sketchbound
