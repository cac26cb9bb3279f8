#include "sketchbound/bounds.hpp"
#include "sketchbound/config.hpp"
#include "sketchbound/experiments.hpp"
#include "sketchbound/lemmas.hpp"
#include "sketchbound/matrix_io.hpp"
#include "sketchbound/parallel.hpp"
#include "sketchbound/rangefinder.hpp"
#include "sketchbound/worstcase.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace sb = sketchbound;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kLemmaFailure = 3 };

int exit_code_for(sb::ErrorKind kind) {
  switch (kind) {
    case sb::ErrorKind::RankDeficient:
    case sb::ErrorKind::NoConvergence:
    case sb::ErrorKind::Overflow:
    case sb::ErrorKind::NonFinite: return kNumerical;
    default: return kUsage;
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sb::SketchError(sb::ErrorKind::Io, "cannot write " + path);
  out << j.dump(2) << '\n';
}

sb::Spectrum read_tail(const std::string& path) {
  const sb::Matrix m = sb::read_matrix(path, sb::MatrixFormat::Csv);
  std::vector<double> values(m.data(), m.data() + m.size());
  return sb::Spectrum::from_unsorted(std::move(values));
}

struct SketchArgs {
  std::string input;
  std::string format = "csv";
  sb::Dim k = 0, p = 0, q = 0;
  std::uint64_t seed = 0;
  bool svd = false;
  std::string report;
  std::size_t bound_trials = sb::kDefaultSigmaInvTrials;
};

int run_sketch(const SketchArgs& a) {
  const sb::Matrix m = sb::read_matrix(a.input, sb::parse_matrix_format(a.format));
  const sb::SketchConfig cfg{a.k, a.p, a.q, a.seed};
  sb::FactorizationResult r;
  if (a.q > 0) r = sb::power_range_finder(m, cfg);
  else if (a.svd) r = sb::randomized_svd(m, cfg);
  else r = sb::range_finder(m, cfg);

  sb::ReportOptions ro;
  ro.bound_trials = a.bound_trials;
  const nlohmann::json j = sb::to_json(sb::residual_report(m, r, cfg, ro));
  if (!a.report.empty()) write_json_file(a.report, j);
  std::cout << j.dump(2) << '\n';
  return kOk;
}

struct SampleArgs {
  sb::Dim n = 0, k = 0, p = 0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string tail = "ones";
  std::string sampler = "auto";
  std::string out;
  bool serial = false;
};

int run_sample_w(const SampleArgs& a) {
  sb::WSampleOptions opts;
  opts.sampler = sb::parse_w_sampler(a.sampler);
  opts.exec = a.serial ? sb::Execution::Serial : sb::Execution::Parallel;
  if (a.tail != "ones") opts.tail = read_tail(a.tail);
  const sb::WSampleBatch batch = sb::estimate_expected_W(a.n, a.k, a.p, a.trials, a.seed, opts);
  const nlohmann::json summary = sb::w_batch_summary_json(batch);
  if (a.out.empty()) {
    sb::write_w_batch_csv(std::cout, batch);
    std::cerr << summary.dump(2) << '\n';
    return kOk;
  }
  std::ofstream csv(a.out, std::ios::binary);
  if (!csv) throw sb::SketchError(sb::ErrorKind::Io, "cannot write " + a.out);
  sb::write_w_batch_csv(csv, batch);
  write_json_file(a.out + ".json", summary);
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

struct BoundsArgs {
  sb::Dim m = 0, n = 0, k = 0, p = 0;
  std::size_t trials = sb::kDefaultSigmaInvTrials;
  std::uint64_t seed = 0;
  std::string source = "mc";
  bool csv = false;
};

int run_bounds(const BoundsArgs& a) {
  const sb::Dim m = a.m > 0 ? a.m : a.n;
  const sb::BoundSet b = sb::bound_set(m, a.n, a.k, a.p, a.trials, a.seed, sb::parse_sigma_inv_source(a.source));
  if (a.csv) std::cout << sb::bound_set_csv_header() << '\n' << sb::bound_set_csv_row(b) << '\n';
  else std::cout << sb::to_json(b).dump(2) << '\n';
  return kOk;
}

struct ExperimentArgs {
  std::string config;
  std::string output_dir;
  std::vector<std::string> only;
  bool serial = false;
};

int run_experiments(const ExperimentArgs& a) {
  const auto configs = sb::load_config(a.config);
  sb::RunOptions opts;
  opts.exec = a.serial ? sb::Execution::Serial : sb::Execution::Parallel;
  opts.output_dir = a.output_dir;
  opts.log = &std::cerr;
  bool all_passed = true;
  std::size_t ran = 0;
  for (const auto& cfg : configs) {
    if (!a.only.empty() && std::find(a.only.begin(), a.only.end(), cfg.name) == a.only.end()) continue;
    const sb::ExperimentOutcome o = sb::run_experiment(cfg, opts);
    ++ran;
    all_passed = all_passed && o.passed;
    for (const auto& f : o.files) std::cout << f.string() << '\n';
  }
  if (ran == 0) throw sb::SketchError(sb::ErrorKind::Parse, "no experiment selected");
  return all_passed ? kOk : kLemmaFailure;
}

struct LemmaArgs {
  std::uint64_t seed = sb::LemmaOptions{}.seed;
  bool negate = false;
  bool serial = false;
  std::string out;
};

int run_lemmas(const LemmaArgs& a) {
  sb::LemmaOptions opts;
  opts.seed = a.seed;
  opts.negate = a.negate;
  opts.exec = a.serial ? sb::Execution::Serial : sb::Execution::Parallel;
  const sb::LemmaReport report = sb::run_lemma_suite(opts);
  const nlohmann::json j = sb::to_json(report);
  if (!a.out.empty()) write_json_file(a.out, j);
  std::cout << j.dump(2) << '\n';
  for (const auto& r : report.results) {
    if (r.failures > 0) std::cerr << "FAILED " << r.name << ": " << r.failures << '/' << r.instances << '\n';
  }
  return report.all_passed() ? kOk : kLemmaFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized range finder and worst-case error laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sketchbound 0.1.0");

  SketchArgs sk;
  auto* sketch = app.add_subcommand("sketch", "Run the range finder (q = 0), randomized SVD or power variant");
  sketch->add_option("--input", sk.input, "Matrix file")->required()->check(CLI::ExistingFile);
  sketch->add_option("--format", sk.format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}));
  sketch->add_option("--k", sk.k, "Target rank")->required();
  sketch->add_option("--p", sk.p, "Oversampling");
  sketch->add_option("--q", sk.q, "Power iterations (q > 0 selects the power variant)");
  sketch->add_option("--seed", sk.seed, "Test-matrix seed");
  sketch->add_flag("--svd", sk.svd, "Also factor C = Q^T A by SVD");
  sketch->add_option("--report", sk.report, "Write the residual report JSON here");
  sketch->add_option("--bound-trials", sk.bound_trials, "Monte Carlo trials for E||Sigma^-1||");

  SampleArgs sw;
  auto* sample = app.add_subcommand("sample-w", "Draw the worst-case error W");
  sample->add_option("--n", sw.n)->required();
  sample->add_option("--k", sw.k)->required();
  sample->add_option("--p", sw.p)->required();
  sample->add_option("--trials", sw.trials);
  sample->add_option("--seed", sw.seed);
  sample->add_option("--tail", sw.tail, "'ones' or a CSV file with the n-k tail entries");
  sample->add_option("--sampler", sw.sampler)->check(CLI::IsMember({"auto", "direct", "bartlett"}));
  sample->add_option("--out", sw.out, "CSV of draws; a summary goes to <out>.json");
  sample->add_flag("--serial", sw.serial, "Use the serial reference path");

  BoundsArgs bd;
  auto* bounds = app.add_subcommand("bounds", "Evaluate every bound for one (m, n, k, p)");
  bounds->add_option("--m", bd.m, "Rows (defaults to n)");
  bounds->add_option("--n", bd.n)->required();
  bounds->add_option("--k", bd.k)->required();
  bounds->add_option("--p", bd.p)->required();
  bounds->add_option("--trials", bd.trials);
  bounds->add_option("--seed", bd.seed);
  bounds->add_option("--source", bd.source, "E||Sigma^-1|| source: mc, upper, lower");
  bounds->add_flag("--csv", bd.csv, "CSV instead of JSON");

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run the experiments of a config file");
  experiment->add_option("--config", ex.config)->required()->check(CLI::ExistingFile);
  experiment->add_option("--output-dir", ex.output_dir, "Overrides output_dir from the config");
  experiment->add_option("--only", ex.only, "Run only these sections");
  experiment->add_flag("--serial", ex.serial, "Use the serial reference path");

  LemmaArgs lm;
  auto* lemma = app.add_subcommand("lemma-suite", "Run the property suite");
  lemma->add_option("--seed", lm.seed);
  lemma->add_flag("--self-test-negate", lm.negate, "Negative control: flip the monotonicity comparisons");
  lemma->add_option("--out", lm.out, "Also write the JSON report here");
  lemma->add_flag("--serial", lm.serial, "Use the serial reference path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  sb::apply_thread_env();
  try {
    if (*sketch) return run_sketch(sk);
    if (*sample) return run_sample_w(sw);
    if (*bounds) return run_bounds(bd);
    if (*experiment) return run_experiments(ex);
    if (*lemma) return run_lemmas(lm);
  } catch (const sb::SketchError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
