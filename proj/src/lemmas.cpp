#include "sketchbound/lemmas.hpp"

#include "sketchbound/bounds.hpp"
#include "sketchbound/linalg.hpp"
#include "sketchbound/rangefinder.hpp"
#include "sketchbound/rng.hpp"
#include "sketchbound/stats.hpp"
#include "sketchbound/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace sketchbound {

namespace {

constexpr double kKsLevel = 0.01;

// Tags keep every lemma on its own family of RNG streams.
enum Tag : std::uint64_t {
  kIdempotence = 1,
  kBestRank,
  kChaining,
  kSingleVector,
  kMultiColumn,
  kWorstCaseT,
  kRotational,
  kReducedW,
  kSandwich,
  kTail,
  kPowerJensen,
  kSvdIdentity,
  kPolar,
  kWishart,
  kExtremeSv,
  kPseudoInverse,
  kLimit,
  kPowerLimit,
  kBartlett,
};

double norm2(const Matrix& a) { return a.size() == 0 ? 0.0 : singular_values(a).largest(); }

Index uniform_index(RngStream& rng, Index lo, Index hi) {
  // inclusive range
  const auto span = static_cast<double>(hi - lo + 1);
  return std::min(hi, lo + static_cast<Index>(rng.uniform() * span));
}

class Suite {
 public:
  Suite(const LemmaOptions& opts) : opts_(opts) {}

  // Runs `instance` for i in [0, count); each returns its minimum slack.
  void add(const std::string& name, Tag tag, std::size_t count,
           const std::function<double(RngStream&)>& instance, std::string detail) {
    const std::uint64_t seed = opts_.seed;
    const auto slacks = run_trials(
        count,
        [&, seed](std::size_t i) {
          RngStream rng(derive_seed(seed, tag, i));
          return instance(rng);
        },
        opts_.exec);
    push(name, slacks, std::move(detail));
  }

  void push(const std::string& name, const std::vector<double>& slacks, std::string detail) {
    LemmaResult r;
    r.name = name;
    r.instances = slacks.size();
    r.worst_slack = std::numeric_limits<double>::infinity();
    for (double s : slacks) {
      // NaN counts as a failure
      if (!(s >= 0.0)) ++r.failures;
      r.worst_slack = std::min(r.worst_slack, std::isnan(s) ? -std::numeric_limits<double>::infinity() : s);
    }
    r.detail = std::move(detail);
    report_.results.push_back(std::move(r));
  }

  std::uint64_t stream(Tag tag, std::uint64_t i) const { return derive_seed(opts_.seed, tag, i); }

  LemmaReport finish() {
    report_.seed = opts_.seed;
    report_.negated = opts_.negate;
    return std::move(report_);
  }

 private:
  const LemmaOptions& opts_;
  LemmaReport report_;
};

// Entrywise ordered nonnegative diagonals, big >= small.
std::pair<Vector, Vector> ordered_diagonals(Index n, RngStream& rng, bool negate) {
  Vector big(n), small(n);
  for (Index i = 0; i < n; ++i) {
    big(i) = 3.0 * rng.uniform();
    small(i) = big(i) * rng.uniform();
  }
  if (negate) std::swap(big, small);
  return {big, small};
}

void projector_lemmas(Suite& suite) {
  suite.add("projector_idempotence", kIdempotence, 100, [](RngStream& rng) {
    const Index m = uniform_index(rng, 2, 12), n = uniform_index(rng, 2, 12);
    const Index l = uniform_index(rng, 1, std::min(m, n) - 1);
    const Matrix a = gaussian_matrix(m, n, rng);
    const Matrix q = range_basis(a * gaussian_matrix(n, l, rng));
    const Matrix f = project_out(q, a);
    return 1e-10 * norm2(a) - norm2(project_out(q, f) - f);
  }, "f(f(A,G),G) = f(A,G), tol 1e-10 ||A||");

  suite.add("best_rank_floor", kBestRank, 100, [](RngStream& rng) {
    const Index m = uniform_index(rng, 2, 12), n = uniform_index(rng, 2, 12);
    const Index l = uniform_index(rng, 1, std::min(m, n));
    const Matrix a = gaussian_matrix(m, n, rng);
    const Spectrum s = singular_values(a);
    const double floor = static_cast<std::size_t>(l) < s.size() ? s[static_cast<std::size_t>(l)] : 0.0;
    return norm2(residual_project(a, gaussian_matrix(n, l, rng))) - floor + 1e-8 * s.largest();
  }, "||f(A,G)|| >= sigma_{l+1}(A), tol 1e-8 ||A||");

  suite.add("chaining", kChaining, 100, [](RngStream& rng) {
    const Index m = uniform_index(rng, 4, 12), n = uniform_index(rng, 4, 12);
    const Index l1 = uniform_index(rng, 1, 2), l2 = uniform_index(rng, 1, 2);
    const Matrix a = gaussian_matrix(m, n, rng);
    const Matrix g1 = gaussian_matrix(n, l1, rng), g2 = gaussian_matrix(n, l2, rng);
    Matrix g(n, l1 + l2);
    g << g1, g2;
    const Matrix diff = residual_project(residual_project(a, g1), g2) - residual_project(a, g);
    return 1e-9 * norm2(a) - diff.cwiseAbs().maxCoeff();
  }, "f(f(A,G1),G2) = f(A,[G1 G2]) entrywise, tol 1e-9 ||A||");
}

void monotonicity_lemmas(Suite& suite, bool negate) {
  suite.add("single_vector_monotonicity", kSingleVector, 100, [negate](RngStream& rng) {
    const Index n = uniform_index(rng, 2, 12);
    const auto [big, small] = ordered_diagonals(n, rng, negate);
    const Matrix g = gaussian_matrix(n, 1, rng);
    const Matrix fb = residual_project(Matrix(big.asDiagonal()), g);
    const Matrix fs = residual_project(Matrix(small.asDiagonal()), g);
    const Matrix xs = gaussian_matrix(n, 20, rng);
    double slack = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < xs.cols(); ++j) {
      slack = std::min(slack, (fb * xs.col(j)).norm() - (fs * xs.col(j)).norm() + 1e-10);
    }
    return slack;
  }, "||f(S1,g) x|| >= ||f(S2,g) x|| for S1 >= S2 diagonal, one sketch column");

  suite.add("multi_column_monotonicity", kMultiColumn, 100, [negate](RngStream& rng) {
    const Index n = uniform_index(rng, 2, 12);
    const Index l = uniform_index(rng, 1, std::min<Index>(4, n - 1));
    const auto [big, small] = ordered_diagonals(n, rng, negate);
    const Matrix g = gaussian_matrix(n, l, rng);
    const Spectrum sb = singular_values(residual_project(Matrix(big.asDiagonal()), g));
    const Spectrum ss = singular_values(residual_project(Matrix(small.asDiagonal()), g));
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sb.size(); ++i) slack = std::min(slack, sb[i] - ss[i] + 1e-9);
    return slack;
  }, "sigma_i(f(S1,G)) >= sigma_i(f(S2,G)) for S1 >= S2 diagonal");

  suite.add("worst_case_monotonicity_in_t", kWorstCaseT, 100, [negate](RngStream& rng) {
    const Index n = uniform_index(rng, 3, 12);
    const Index k = uniform_index(rng, 1, n - 2);
    const Index l = std::min<Index>(n - 1, k + uniform_index(rng, 0, 1));
    double t1 = 1.0 + 10.0 * rng.uniform();
    double t2 = t1 * (1.0 + 10.0 * rng.uniform());
    if (negate) std::swap(t1, t2);
    const Matrix g = gaussian_matrix(n, l, rng);
    const Spectrum s1 = singular_values(residual_project(worst_case_matrix(n, k, t1).as_diagonal(), g));
    const Spectrum s2 = singular_values(residual_project(worst_case_matrix(n, k, t2).as_diagonal(), g));
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s1.size(); ++i) slack = std::min(slack, s2[i] - s1[i] + 1e-9);
    return slack;
  }, "sigma_i(f(M(t2),G)) >= sigma_i(f(M(t1),G)) for t2 >= t1, shared G");
}

void distribution_lemmas(Suite& suite, const LemmaOptions& opts) {
  {
    RngStream setup(suite.stream(kRotational, 0));
    const Matrix a = gaussian_matrix(8, 8, setup);
    const Matrix uav = random_orthogonal(8, setup) * a * random_orthogonal(8, setup);
    std::vector<double> plain(2000), rotated(2000);
    for (std::size_t s = 0; s < plain.size(); ++s) {
      RngStream r1(suite.stream(kRotational, 2 * s + 1)), r2(suite.stream(kRotational, 2 * s + 2));
      plain[s] = norm2(residual_project(a, gaussian_matrix(8, 3, r1)));
      rotated[s] = norm2(residual_project(uav, gaussian_matrix(8, 3, r2)));
    }
    const KsResult ks = ks_two_sample(plain, rotated);
    suite.push("rotational_invariance_ks", {ks.p_value - kKsLevel},
               "||f(A,G)|| vs ||f(UAV,G)||, 8x8, 2000 draws each, KS p >= 0.01 (slack = p - 0.01)");
  }
  {
    WSampleOptions direct, bartlett;
    direct.sampler = WSampler::Direct;
    bartlett.sampler = WSampler::Bartlett;
    direct.exec = bartlett.exec = opts.exec;
    const auto a = estimate_expected_W(60, 5, 5, 1000, suite.stream(kBartlett, 0), direct);
    const auto b = estimate_expected_W(60, 5, 5, 1000, suite.stream(kBartlett, 1), bartlett);
    suite.push("bartlett_sampler_equivalence", {ks_two_sample(a.draws, b.draws).p_value - kKsLevel},
               "direct vs Bartlett W draws, n=60 k=p=5, 1000 each, KS p >= 0.01");
  }
}

void worst_case_lemmas(Suite& suite) {
  suite.add("reduced_w_identity", kReducedW, 500, [](RngStream& rng) {
    const Index n = uniform_index(rng, 3, 40);
    const Index k = uniform_index(rng, 1, std::min<Index>(n - 2, 8));
    const Index p = uniform_index(rng, 0, std::min<Index>(n - k - 1, 6));
    const Matrix x1 = gaussian_matrix(n - k, k, rng);
    const Matrix x2 = gaussian_matrix(n - k, p, rng);
    const Spectrum sigma = singular_values(gaussian_matrix(k + p, k, rng));
    const double reduced = worst_case_error_from_parts(x1, x2, sigma);
    const Index rows = n - k;
    const Matrix f = residual_project(Matrix(Matrix::Identity(rows, rows)),
                                      p > 0 ? x2 : Matrix(Matrix::Zero(rows, 1)));
    Matrix block(rows, k + rows);
    block << x1 * sigma.as_vector().cwiseInverse().asDiagonal(), Matrix::Identity(rows, rows);
    const double dense = norm2(f * block);
    return 1e-8 * std::max(1.0, dense) - std::abs(reduced - dense);
  }, "sqrt(1 + ||P X1 Sigma^-1||^2) vs dense SVD of f(I,X2)[X1 Sigma^-1 I], rel tol 1e-8");

  suite.add("sandwich_l_w", kSandwich, 300, [](RngStream& rng) {
    const Index n = uniform_index(rng, 10, 40);
    const Index k = uniform_index(rng, 1, 5), p = uniform_index(rng, 0, 4);
    const Matrix x1 = gaussian_matrix(n - k, k, rng);
    const Matrix x2 = gaussian_matrix(n - k, p, rng);
    const Spectrum sigma = singular_values(gaussian_matrix(k + p, k, rng));
    const double w = worst_case_error_from_parts(x1, x2, sigma);
    const double l = worst_case_l_norm(x1, x2, sigma);
    return std::min(w - l + 1e-9, l + 1.0 + 1e-9 - w);
  }, "||L|| <= W <= ||L|| + 1");

  suite.add("tail_monotonicity", kTail, 200, [](RngStream& rng) {
    std::vector<double> tail(20);
    for (auto& v : tail) v = rng.uniform();
    const Spectrum d = Spectrum::from_unsorted(tail);
    RngStream a = rng.substream(1), b = rng.substream(1);
    return sample_worst_case_error(23, 3, 2, std::nullopt, b) + 1e-9 -
           sample_worst_case_error(23, 3, 2, d, a);
  }, "W(D) <= W(I) for D <= I, shared randomness");
}

void algorithm_lemmas(Suite& suite) {
  suite.add("power_jensen", kPowerJensen, 100, [](RngStream& rng) {
    const Index m = uniform_index(rng, 3, 22), n = uniform_index(rng, 3, 22);
    const Dim k = uniform_index(rng, 1, 2), p = uniform_index(rng, 0, 1);
    const Matrix a = gaussian_matrix(m, n, rng) / std::sqrt(static_cast<double>(std::max(m, n)));
    const std::uint64_t seed = rng.substream(7).seed();
    double slack = std::numeric_limits<double>::infinity();
    for (Dim q = 1; q <= 3; ++q) {
      const FactorizationResult r = power_range_finder(a, {k, p, q, seed});
      Matrix powered = a;
      for (Dim i = 0; i < q; ++i) powered = a * (a.transpose() * powered);
      const double rhs = std::pow(norm2(project_out(r.q, powered)), 1.0 / static_cast<double>(2 * q + 1));
      slack = std::min(slack, rhs + 1e-6 - r.residual_spectral);
    }
    return slack;
  }, "||(I-QQ*)A|| <= ||(I-QQ*)(AA*)^q A||^(1/(2q+1)), q = 1..3");

  suite.add("svd_identity", kSvdIdentity, 100, [](RngStream& rng) {
    const Index m = uniform_index(rng, 2, 40), n = uniform_index(rng, 2, 40);
    const Dim l = uniform_index(rng, 1, std::min(m, n));
    const Dim k = uniform_index(rng, 1, l);
    const Matrix a = gaussian_matrix(m, n, rng);
    const FactorizationResult r = randomized_svd(a, {k, l - k, 0, rng.substream(3).seed()});
    const double na = norm2(a);
    const double e_svd = norm2(a - r.svd->u * r.svd->s.as_diagonal() * r.svd->v.transpose());
    const double e_qc = norm2(a - r.q * r.c);
    const double e_proj = norm2(a - r.q * (r.q.transpose() * a));
    const double worst = std::max({std::abs(e_svd - e_qc), std::abs(e_qc - e_proj), std::abs(e_svd - e_proj)});
    return 1e-8 * na - worst;
  }, "||A - USV*|| = ||A - QC|| = ||A - QQ*A||, tol 1e-8 ||A||");

  suite.add("polar_t2_scaling", kPolar, 20, [](RngStream& rng) {
    const Index k = uniform_index(rng, 1, 5), rows = uniform_index(rng, 1, 8);
    const Matrix b = gaussian_matrix(rows, k, rng);
    std::vector<double> scaled;
    for (double t : {1e2, 1e3, 1e4}) {
      Matrix a(k + rows, k);
      a << Matrix::Identity(k, k), b / t;
      scaled.push_back(polar_orthonormal(a).e.norm() * t * t);
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    return 1.5 - *hi / *lo;
  }, "t^2 ||E(t)||_F varies by at most 1.5x over t = 1e2..1e4 for [I; B/t]");
}

void random_matrix_lemmas(Suite& suite, const LemmaOptions& opts) {
  std::vector<double> wishart;
  for (auto [k, p, trials] : {std::tuple<Dim, Dim, std::size_t>{2, 3, 5000}, {10, 11, 2000}, {100, 100, 2000}}) {
    const MCEstimate e = estimate_sigma_inv_frob_sq(k, p, trials, suite.stream(kWishart, static_cast<std::uint64_t>(k)), opts.exec);
    const double target = static_cast<double>(k) / static_cast<double>(p - 1);
    wishart.push_back(e.ci_half_width - std::abs(e.mean - target));
  }
  suite.push("wishart_trace", wishart, "E||Sigma^-1||_F^2 = k/(p-1) within CI, (k,p) in {(2,3),(10,11),(100,100)}");

  std::vector<double> extreme, pinv;
  for (auto [m, n] : {std::pair<Index, Index>{200, 100}, {400, 100}}) {
    const auto trials = 200;
    std::vector<double> smin(trials), smax(trials), inv(trials);
    const auto seed = suite.stream(kExtremeSv, static_cast<std::uint64_t>(m));
    const auto sv = run_trials(2 * trials, [&](std::size_t i) {
      RngStream rng(derive_seed(seed, i / 2));
      const Spectrum s = singular_values(gaussian_matrix(m, n, rng));
      return i % 2 == 0 ? s[s.size() - 1] : s.largest();
    }, opts.exec);
    for (int i = 0; i < trials; ++i) {
      smin[i] = sv[2 * i];
      smax[i] = sv[2 * i + 1];
      inv[i] = 1.0 / smin[i];
    }
    const double rm = std::sqrt(static_cast<double>(m)), rn = std::sqrt(static_cast<double>(n));
    const MCEstimate lo = summarize(smin), hi = summarize(smax), pi = summarize(inv);
    extreme.push_back(std::min(lo.mean - (rm - rn) + 3.0 * lo.ci_half_width,
                               rm + rn + 3.0 * hi.ci_half_width - hi.mean));
    const double lower = 1.0 / std::sqrt(static_cast<double>(m - n + 1));
    const double upper = std::numbers::e * rm / static_cast<double>(m - n);
    pinv.push_back(std::min(pi.mean - lower + 3.0 * pi.ci_half_width, upper + 3.0 * pi.ci_half_width - pi.mean));
  }
  suite.push("extreme_singular_values", extreme,
             "E sigma_min >= sqrt(m)-sqrt(n), E sigma_max <= sqrt(m)+sqrt(n), 3 CI slack, (200,100),(400,100)");
  suite.push("pseudo_inverse_bracket", pinv,
             "E||A^+|| in [1/sqrt(m-n+1), e sqrt(m)/(m-n)], 3 CI slack");
}

void limit_lemmas(Suite& suite) {
  suite.add("limit_identity", kLimit, 10, [](RngStream& rng) {
    const LimitCheck c = limit_residual_check(400, 20, 20, 1e6, rng.seed());
    return 1e-4 * c.via_w - std::abs(c.direct - c.via_w);
  }, "||f(M(t),G)|| vs W from the decomposition of G, n=400 k=p=20 t=1e6, rel tol 1e-4");

  suite.add("power_limit", kPowerLimit, 20, [](RngStream& rng) {
    const FactorizationResult r = power_range_finder(worst_case_matrix(400, 20, 1e6), {20, 20, 1, rng.seed()});
    return std::min(r.residual_spectral - 1.0 + 1e-9, 1.05 - r.residual_spectral);
  }, "q=1 on M(1e6), n=400 k=p=20: residual in [1, 1.05]");
}

}  // namespace

bool LemmaReport::all_passed() const { return total_failures() == 0; }

std::size_t LemmaReport::total_failures() const {
  std::size_t total = 0;
  for (const auto& r : results) total += r.failures;
  return total;
}

const LemmaResult* LemmaReport::find(const std::string& name) const {
  for (const auto& r : results) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

LemmaReport run_lemma_suite(const LemmaOptions& opts) {
  Suite suite(opts);
  projector_lemmas(suite);
  monotonicity_lemmas(suite, opts.negate);
  distribution_lemmas(suite, opts);
  worst_case_lemmas(suite);
  algorithm_lemmas(suite);
  random_matrix_lemmas(suite, opts);
  limit_lemmas(suite);
  return suite.finish();
}

nlohmann::json to_json(const LemmaReport& report) {
  nlohmann::json lemmas = nlohmann::json::array();
  for (const auto& r : report.results) {
    lemmas.push_back({{"name", r.name},
                      {"instances", r.instances},
                      {"failures", r.failures},
                      {"worst_slack", std::isfinite(r.worst_slack) ? nlohmann::json(r.worst_slack)
                                                                    : nlohmann::json(nullptr)},
                      {"passed", r.failures == 0},
                      {"detail", r.detail}});
  }
  return {{"seed", report.seed},
          {"negated", report.negated},
          {"passed", report.all_passed()},
          {"total_failures", report.total_failures()},
          {"lemmas", lemmas}};
}

}  // namespace sketchbound
