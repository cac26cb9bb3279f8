// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [scratch-dir]
#include "sketchbound/bounds.hpp"
#include "sketchbound/config.hpp"
#include "sketchbound/experiments.hpp"
#include "sketchbound/lemmas.hpp"
#include "sketchbound/rng.hpp"
#include "sketchbound/worstcase.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace sb = sketchbound;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << std::endl;
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

sb::ExperimentConfig section(const std::string& text, const fs::path& out) {
  std::istringstream in(text + "output_dir = \"" + out.string() + "\"\n");
  return sb::parse_config(in).at(0);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> draws_column(const fs::path& csv) {
  std::ifstream in(csv);
  std::vector<double> w;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    w.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  }
  return w;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Fig2Run {
  sb::ExperimentOutcome outcome;
  std::vector<double> draws;
  double seconds = 0;
};

Fig2Run fig2(const sb::ExperimentConfig& cfg, const std::string& stamp) {
  sb::RunOptions opts;
  opts.timestamp = stamp;
  const auto t0 = std::chrono::steady_clock::now();
  Fig2Run r;
  r.outcome = sb::run_fig2(cfg, opts);
  r.seconds = seconds_since(t0);
  r.draws = draws_column(cfg.output_dir / (cfg.name + "_draws.csv"));
  return r;
}

// Byte-identical outputs of two runs, ignoring the first line of each CSV.
bool same_outputs(const sb::ExperimentOutcome& a, const sb::ExperimentOutcome& b, std::string& why) {
  if (a.files.size() != b.files.size()) {
    why = "file lists differ";
    return false;
  }
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    std::string x = slurp(a.files[i]), y = slurp(b.files[i]);
    if (a.files[i].extension() == ".csv") {
      if (x.rfind("# generated: ", 0) != 0 || y.rfind("# generated: ", 0) != 0) {
        why = a.files[i].filename().string() + " lacks the timestamp line";
        return false;
      }
      x.erase(0, x.find('\n') + 1);
      y.erase(0, y.find('\n') + 1);
    }
    if (x != y) {
      why = a.files[i].filename().string() + " differs";
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  sb::apply_thread_env();
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "sketchbound_acceptance";
  fs::remove_all(root);
  const std::uint64_t seed = 20240229;
  const std::string seed_line = "seed = " + std::to_string(seed) + "\n";

  // 1. fig2 at k = p = 100
  const auto cfg_a = section("[fig2_variability.a]\nn_grid = [100000]\nk_rule = \"fixed:100\"\np_rule = \"fixed:100\"\n"
                             "trials_per_point = 1000\n" + seed_line, root / "run1");
  const Fig2Run a = fig2(cfg_a, "run1");
  {
    const auto& s = a.outcome.summary;
    const double mn = s["min"], mx = s["max"], sd = s["std"];
    const bool ok = mn >= 55 && mx <= 92 && sd >= 2.5 && sd <= 5.0 && a.draws.size() == 1000;
    report(1, ok,
           "n=1e5 k=p=100, 1000 draws: min " + fmt("%.2f", mn) + ", max " + fmt("%.2f", mx) + " (need [55, 92]), std " +
               fmt("%.3f", sd) + " (need [2.5, 5.0]), " + fmt("%.1f", a.seconds) + " s");
  }

  // 2. fig2 at k = p = 1000
  const auto cfg_b = section("[fig2_variability.b]\nn_grid = [100000]\nk_rule = \"fixed:1000\"\n"
                             "p_rule = \"fixed:1000\"\ntrials_per_point = 200\n" + seed_line, root / "run1");
  const Fig2Run b = fig2(cfg_b, "run1");
  {
    const auto& s = b.outcome.summary;
    const double mn = s["min"], mx = s["max"], sd = s["std"];
    const bool ok = mn >= 21.5 && mx <= 25.5 && sd >= 0.2 && sd <= 0.5 && b.draws.size() == 200;
    report(2, ok,
           "n=1e5 k=p=1000, 200 draws: min " + fmt("%.3f", mn) + ", max " + fmt("%.3f", mx) +
               " (need [21.5, 25.5]), std " + fmt("%.3f", sd) + " (need [0.2, 0.5]), " + fmt("%.1f", b.seconds) + " s");
  }

  // 3 and 4. Sandwich and proxy on three tuples. The (1e5, ...) tuples reuse
  // the fig2 draws; (1e4, 100, 100) gets its own 1000 draws.
  struct Tuple {
    sb::Dim n, k, p;
    sb::MCEstimate w;
  };
  sb::WSampleOptions wopts;
  const auto small = sb::estimate_expected_W(10000, 100, 100, 1000, sb::derive_seed(seed, 3), wopts);
  const std::vector<Tuple> tuples = {{10000, 100, 100, small.summary},
                                     {100000, 100, 100, sb::summarize(a.draws)},
                                     {100000, 1000, 1000, sb::summarize(b.draws)}};
  bool sandwich_ok = true, proxy_ok = true;
  std::string sandwich_detail, proxy_detail;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& t = tuples[i];
    const sb::BoundSet bs = sb::bound_set(t.n, t.n, t.k, t.p, sb::kDefaultSigmaInvTrials, sb::derive_seed(seed, 0xb0, i));
    // The bounds are linear in E||Sigma^-1||, so its CI propagates with the bound's coefficient.
    const double e = *bs.e_sigma_inv;
    const double ci_lo = t.w.ci_half_width + (*bs.sharp_lower / e) * bs.e_sigma_inv_ci;
    const double ci_hi = t.w.ci_half_width + (*bs.sharp_upper / e) * bs.e_sigma_inv_ci;
    const bool in = t.w.mean >= *bs.sharp_lower - ci_lo && t.w.mean <= *bs.sharp_upper + ci_hi &&
                    t.w.mean < *bs.hmt_upper;
    sandwich_ok = sandwich_ok && in;
    const double rel = std::abs(t.w.mean - *bs.proxy) / *bs.proxy;
    proxy_ok = proxy_ok && rel <= 0.10;
    const std::string tag = "(" + std::to_string(t.n) + "," + std::to_string(t.k) + "," + std::to_string(t.p) + ")";
    sandwich_detail += " " + tag + " mean " + fmt("%.3f", t.w.mean) + " in [" + fmt("%.3f", *bs.sharp_lower - ci_lo) +
                       ", " + fmt("%.3f", *bs.sharp_upper + ci_hi) + "], hmt " + fmt("%.2f", *bs.hmt_upper) + ";";
    proxy_detail += " " + tag + " mean/proxy - 1 = " + fmt("%+.4f", (t.w.mean - *bs.proxy) / *bs.proxy) + ";";
  }
  report(3, sandwich_ok, "sharp bounds +- CI and below the previous bound:" + sandwich_detail);
  report(4, proxy_ok, "within 10% of the proxy:" + proxy_detail);

  // 5. Limit identity
  {
    double worst = 0;
    bool ok = true;
    for (std::size_t i = 0; i < 50; ++i) {
      const sb::LimitCheck c = sb::limit_residual_check(400, 20, 20, 1e6, sb::derive_seed(seed, 5, i));
      const double rel = std::abs(c.direct - c.via_w) / c.via_w;
      worst = std::max(worst, rel);
      ok = ok && std::abs(c.direct - c.via_w) <= 1e-4 * c.via_w;
    }
    report(5, ok, "n=400 k=p=20 t=1e6, 50 shared-G trials: max |direct - W|/W = " + fmt("%.3e", worst) +
                      " (need <= 1e-4)");
  }

  // 6. Power-trick number, computed directly and through the bounds table.
  {
    const double direct = std::pow(sb::error_proxy(1000000000, 200, 200), 1.0 / 7.0);
    const auto cfg = section("[bounds_table]\nn_grid = [1000000000]\nk_rule = \"fixed:200\"\np_rule = \"fixed:200\"\n"
                             "bounds_trials = 100\n" + seed_line, root / "run1");
    const double table = sb::run_bounds_table(cfg).summary["rows"][0]["proxy_pow_q3"];
    const bool ok = direct >= 3.40 && direct <= 3.43 && table == direct;
    report(6, ok, "proxy(1e9, 200, 200)^(1/7) = " + fmt("%.5f", direct) + " (need [3.40, 3.43])");
  }

  // 7. Lemma suite at the default seed, and the negative control.
  const auto cfg_l = section("[lemma_suite]\nseed = " + std::to_string(sb::LemmaOptions{}.seed) + "\n", root / "run1");
  sb::RunOptions lopts;
  lopts.timestamp = "run1";
  const auto lemmas = sb::run_lemma_suite_experiment(cfg_l, lopts);
  {
    sb::ExperimentConfig neg_cfg = cfg_l;
    neg_cfg.name = "lemma_suite.negated";
    const auto negated = sb::run_lemma_suite_experiment(neg_cfg, lopts, true);
    const std::vector<std::string> required = {
        "chaining", "single_vector_monotonicity", "multi_column_monotonicity", "rotational_invariance_ks",
        "reduced_w_identity", "sandwich_l_w", "power_jensen", "svd_identity", "polar_t2_scaling",
        "wishart_trace", "extreme_singular_values", "pseudo_inverse_bracket"};
    std::string missing;
    std::size_t n_lemmas = 0;
    for (const auto& name : required) {
      bool found = false;
      for (const auto& l : lemmas.summary["lemmas"]) found = found || l["name"] == name;
      if (!found) missing += " " + name;
    }
    n_lemmas = lemmas.summary["lemmas"].size();
    const std::size_t fails = lemmas.summary["total_failures"];
    const std::size_t neg_fails = negated.summary["total_failures"];
    std::string failed;
    for (const auto& l : lemmas.summary["lemmas"]) {
      if (l["failures"].get<std::size_t>() > 0) failed += " " + l["name"].get<std::string>();
    }
    const bool ok = lemmas.passed && missing.empty() && !negated.passed && neg_fails > 0;
    report(7, ok, std::to_string(n_lemmas) + " properties, " + std::to_string(fails) + " failures" +
                      (failed.empty() ? "" : " [" + failed + " ]") + (missing.empty() ? "" : "; missing:" + missing) +
                      "; negated run: " + std::to_string(neg_fails) + " failures");
  }

  // 8. Determinism: rerun every experiment kind into a second directory.
  {
    const fs::path run2 = root / "run2";
    auto moved = [&](sb::ExperimentConfig c) {
      c.output_dir = run2;
      return c;
    };
    sb::RunOptions opts2;
    opts2.timestamp = "run2";
    opts2.exec = sb::Execution::Serial;
    sb::RunOptions opts1;
    opts1.timestamp = "run1";

    const auto cfg_f1 = section("[fig1_fixed_ratio]\nn_grid = [1000, 2000, 4000, 10000]\nk_rule = \"ratio:0.01\"\n"
                                "p_rule = \"ratio:0.01\"\ntrials_per_point = 20\nbounds_trials = 200\n" + seed_line,
                                root / "run1");
    const auto cfg_t = section("[bounds_table]\nn_grid = [10000, 1000000]\nk_rule = \"fixed:100\"\n"
                               "p_rule = \"fixed:100\"\nbounds_trials = 200\n" + seed_line, root / "run1");
    struct Pair {
      std::string name;
      sb::ExperimentOutcome first, second;
    };
    std::vector<Pair> pairs;
    pairs.push_back({"fig1", sb::run_fig1(cfg_f1, opts1), sb::run_fig1(moved(cfg_f1), opts2)});
    pairs.push_back({"fig2a", a.outcome, sb::run_fig2(moved(cfg_a), opts2)});
    pairs.push_back({"bounds_table", sb::run_bounds_table(cfg_t, opts1), sb::run_bounds_table(moved(cfg_t), opts2)});
    pairs.push_back({"lemma_suite", lemmas, sb::run_lemma_suite_experiment(moved(cfg_l), opts2)});

    bool ok = true;
    std::string detail;
    std::size_t files = 0;
    for (const auto& p : pairs) {
      std::string why;
      const bool same = same_outputs(p.first, p.second, why);
      ok = ok && same;
      files += p.first.files.size();
      if (!same) detail += " " + p.name + ": " + why + ";";
    }
    report(8, ok, std::to_string(files) + " files from fig1, fig2a, bounds_table and lemma_suite reruns (second run serial)" +
                      (detail.empty() ? " identical modulo the timestamp line" : ":" + detail));
  }

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
