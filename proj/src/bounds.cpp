#include "sketchbound/bounds.hpp"

#include "sketchbound/format.hpp"
#include "sketchbound/linalg.hpp"
#include "sketchbound/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sketchbound {

namespace {

double sq(Dim x) { return std::sqrt(static_cast<double>(x)); }

void require_oversampling(Dim p, Dim minimum, const char* what) {
  if (p < minimum) {
    throw SketchError(ErrorKind::InvalidOversampling,
                      std::string(what) + " needs p >= " + std::to_string(minimum) + ", got " +
                          std::to_string(p));
  }
}

void require_rank(Dim k) {
  if (k < 1) throw SketchError(ErrorKind::InvalidDims, "k must be >= 1");
}

void require_trials(std::size_t trials, std::size_t minimum) {
  if (trials < minimum) {
    throw SketchError(ErrorKind::InvalidDims,
                      "need at least " + std::to_string(minimum) + " trials");
  }
}

}  // namespace

double bound_hmt(Dim m, Dim n, Dim k, Dim p) {
  require_oversampling(p, 2, "bound_hmt");
  require_rank(k);
  if (m < 1 || n < 1) throw SketchError(ErrorKind::InvalidDims, "m, n must be positive");
  return 1.0 + 4.0 * sq(k + p) / static_cast<double>(p - 1) * sq(std::min(m, n));
}

Bracket sigma_inv_norm_bounds(Dim k, Dim p) {
  require_oversampling(p, 1, "sigma_inv_norm_bounds");
  require_rank(k);
  return {1.0 / sq(p + 1), std::numbers::e * sq(k + p) / static_cast<double>(p)};
}

MCEstimate estimate_sigma_inv_norm(Dim k, Dim p, std::size_t trials, std::uint64_t seed,
                                   Execution exec) {
  require_oversampling(p, 1, "estimate_sigma_inv_norm");
  require_rank(k);
  require_trials(trials, 100);
  const auto draws = run_trials(
      trials,
      [=](std::size_t i) {
        RngStream rng(derive_seed(seed, i));
        // 1/sigma_min(G) = ||R^{-1}|| for the R factor of G.
        Matrix r = bartlett_factor(k + p, k, rng);
        return spectral_norm(upper_triangular_inverse(std::move(r))).value;
      },
      exec);
  return summarize(draws);
}

MCEstimate estimate_sigma_inv_frob_sq(Dim k, Dim p, std::size_t trials, std::uint64_t seed,
                                      Execution exec) {
  require_oversampling(p, 2, "estimate_sigma_inv_frob_sq");
  require_rank(k);
  require_trials(trials, 100);
  const auto draws = run_trials(
      trials,
      [=](std::size_t i) {
        RngStream rng(derive_seed(seed, i));
        const Matrix r = bartlett_factor(k + p, k, rng);
        const Matrix rinv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
        return rinv.squaredNorm();
      },
      exec);
  return summarize(draws);
}

double bound_sharp_upper(Dim n, Dim k, Dim p, double e_sigma_inv) {
  require_rank(k);
  if (k >= n) throw SketchError(ErrorKind::InvalidDims, "sharp upper bound needs n > k");
  if (p < 0 || !(e_sigma_inv > 0.0)) {
    throw SketchError(ErrorKind::InvalidDims, "sharp upper bound needs p >= 0 and e_sigma_inv > 0");
  }
  return 1.0 + (sq(n - k) + sq(k)) * e_sigma_inv;
}

double bound_sharp_lower(Dim n, Dim k, Dim p, double e_sigma_inv) {
  require_rank(k);
  if (n < k + p + 3) throw SketchError(ErrorKind::InvalidDims, "sharp lower bound needs n >= k+p+3");
  if (!(e_sigma_inv > 0.0)) throw SketchError(ErrorKind::InvalidDims, "e_sigma_inv must be positive");
  return sq(n - (k + p + 2)) * e_sigma_inv;
}

double error_proxy(Dim n, Dim k, Dim p) {
  if (n < 1 || k < 0) throw SketchError(ErrorKind::InvalidDims, "error_proxy needs n >= 1, k >= 0");
  require_oversampling(p, 1, "error_proxy");
  return sq(n) / (sq(k + p) - sq(k));
}

Bracket asymptotic_bounds(Dim n, Dim k, Dim p) {
  if (k < 0 || p < 1 || k + p >= n) {
    throw SketchError(ErrorKind::InvalidDims, "asymptotic bounds need p >= 1 and k+p < n");
  }
  const double gap = sq(k + p) - sq(k);
  return {sq(n - k - p) / gap, (sq(n - k) + sq(k)) / gap};
}

double mixed_norm_bound(const Spectrum& spectrum, Dim k, Dim p, double e_sigma_inv) {
  require_oversampling(p, 2, "mixed_norm_bound");
  require_rank(k);
  if (static_cast<Dim>(spectrum.size()) <= k) {
    throw SketchError(ErrorKind::InvalidDims, "spectrum must be longer than k");
  }
  const auto kk = static_cast<std::size_t>(k);
  return (1.0 + std::sqrt(static_cast<double>(k) / static_cast<double>(p - 1))) * spectrum[kk] +
         e_sigma_inv * spectrum.tail_frobenius(kk);
}

const char* to_string(SigmaInvSource source) {
  switch (source) {
    case SigmaInvSource::ClosedFormUpper: return "closed_form_upper";
    case SigmaInvSource::ClosedFormLower: return "closed_form_lower";
    case SigmaInvSource::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

SigmaInvSource parse_sigma_inv_source(const std::string& name) {
  if (name == "closed_form_upper" || name == "upper") return SigmaInvSource::ClosedFormUpper;
  if (name == "closed_form_lower" || name == "lower") return SigmaInvSource::ClosedFormLower;
  if (name == "monte_carlo" || name == "mc") return SigmaInvSource::MonteCarlo;
  throw SketchError(ErrorKind::Parse, "unknown e_sigma_inv source '" + name + "'");
}

BoundSet bound_set(Dim m, Dim n, Dim k, Dim p, std::size_t trials, std::uint64_t seed,
                   SigmaInvSource source, Execution exec) {
  require_rank(k);
  if (p < 0 || m < 1 || n < 1 || k + p > std::min(m, n)) {
    throw SketchError(ErrorKind::InvalidDims, "bound_set needs p >= 0 and k + p <= min(m, n)");
  }
  BoundSet b;
  b.m = m;
  b.n = n;
  b.k = k;
  b.p = p;
  b.e_sigma_inv_source = source;
  b.seed = seed;

  // Each component either fills its field or leaves it empty.
  auto attempt = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const SketchError&) {
      return std::nullopt;
    }
  };

  const Dim n_eff = std::min(m, n);
  b.hmt_upper = attempt([&] { return bound_hmt(m, n, k, p); });
  b.proxy = attempt([&] { return error_proxy(n_eff, k, p); });
  if (auto asym = attempt([&] { return asymptotic_bounds(n_eff, k, p).lower; })) {
    b.asymptotic_lower = asym;
    b.asymptotic_upper = asymptotic_bounds(n_eff, k, p).upper;
  }

  switch (source) {
    case SigmaInvSource::ClosedFormUpper:
      b.e_sigma_inv = attempt([&] { return sigma_inv_norm_bounds(k, p).upper; });
      break;
    case SigmaInvSource::ClosedFormLower:
      b.e_sigma_inv = attempt([&] { return sigma_inv_norm_bounds(k, p).lower; });
      break;
    case SigmaInvSource::MonteCarlo:
      try {
        const MCEstimate est = estimate_sigma_inv_norm(k, p, trials, seed, exec);
        b.e_sigma_inv = est.mean;
        b.e_sigma_inv_ci = est.ci_half_width;
        b.trials = est.trials;
      } catch (const SketchError&) {
      }
      break;
  }

  if (b.e_sigma_inv) {
    const double e = *b.e_sigma_inv;
    b.sharp_upper = attempt([&] { return bound_sharp_upper(n_eff, k, p, e); });
    b.sharp_lower = attempt([&] { return bound_sharp_lower(n_eff, k, p, e); });
    b.mixed_norm_flat = attempt([&] {
      if (n_eff <= k) throw SketchError(ErrorKind::InvalidDims, "no tail");
      require_oversampling(p, 2, "mixed_norm_bound");
      // Flat unit tail in closed form; avoids building an n-long spectrum.
      return (1.0 + std::sqrt(static_cast<double>(k) / static_cast<double>(p - 1))) +
             e * sq(n_eff - k);
    });
  }
  return b;
}

nlohmann::json to_json(const BoundSet& b) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {
      {"m", b.m},
      {"n", b.n},
      {"k", b.k},
      {"p", b.p},
      {"hmt_upper", opt(b.hmt_upper)},
      {"sharp_upper", opt(b.sharp_upper)},
      {"sharp_lower", opt(b.sharp_lower)},
      {"proxy", opt(b.proxy)},
      {"asymptotic_upper", opt(b.asymptotic_upper)},
      {"asymptotic_lower", opt(b.asymptotic_lower)},
      {"mixed_norm_flat", opt(b.mixed_norm_flat)},
      {"e_sigma_inv", opt(b.e_sigma_inv)},
      {"e_sigma_inv_ci", b.e_sigma_inv_ci},
      {"e_sigma_inv_source", to_string(b.e_sigma_inv_source)},
      {"ci_convention", "3 standard errors"},
      {"trials", b.trials},
      {"seed", b.seed},
  };
}

std::string bound_set_csv_header() {
  return "m,n,k,p,hmt,sharp_lo,sharp_hi,proxy,asym_lo,asym_hi,e_sigma_inv,ci,source,trials,seed";
}

std::string bound_set_csv_row(const BoundSet& b) {
  std::ostringstream out;
  out << b.m << ',' << b.n << ',' << b.k << ',' << b.p << ',' << format_optional(b.hmt_upper) << ','
      << format_optional(b.sharp_lower) << ',' << format_optional(b.sharp_upper) << ','
      << format_optional(b.proxy) << ',' << format_optional(b.asymptotic_lower) << ','
      << format_optional(b.asymptotic_upper) << ',' << format_optional(b.e_sigma_inv) << ','
      << format_double(b.e_sigma_inv_ci) << ',' << to_string(b.e_sigma_inv_source) << ','
      << b.trials << ',' << b.seed;
  return out.str();
}

}  // namespace sketchbound
