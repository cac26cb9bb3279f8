#include "sketchbound/experiments.hpp"

#include "sketchbound/bounds.hpp"
#include "sketchbound/format.hpp"
#include "sketchbound/lemmas.hpp"
#include "sketchbound/rng.hpp"
#include "sketchbound/svg.hpp"
#include "sketchbound/worstcase.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sketchbound {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kBoundsStream = 0xb0;

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  fs::path dir;
  std::string timestamp;
  ExperimentOutcome outcome;

  Context(const ExperimentConfig& c, const RunOptions& o) : cfg(c), opts(o) {
    dir = o.output_dir.empty() ? c.output_dir : o.output_dir;
    timestamp = o.timestamp.empty() ? utc_timestamp() : o.timestamp;
    outcome.name = c.name;
    outcome.kind = c.kind;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw SketchError(ErrorKind::Io, "cannot create output directory " + dir.string());
  }

  fs::path path(const std::string& suffix) const { return dir / (cfg.name + suffix); }

  std::ofstream open(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw SketchError(ErrorKind::Io, "cannot write " + p.string());
    outcome.files.push_back(p);
    return out;
  }

  std::ofstream open_csv(const fs::path& p) {
    std::ofstream out = open(p);
    out << "# generated: " << timestamp << '\n';
    return out;
  }

  void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out = open(p);
    out << text;
  }

  void log(const std::string& msg) const {
    if (opts.log) *opts.log << '[' << cfg.name << "] " << msg << std::endl;
  }

  ExperimentOutcome finish(nlohmann::json summary) {
    summary["config"] = cfg.to_json();
    outcome.summary = std::move(summary);
    write_text(path(".json"), outcome.summary.dump(2) + "\n");
    return std::move(outcome);
  }
};

// Minimal reader for the CSVs written here, so plots are built from exactly
// what was written to disk.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SketchError(ErrorKind::Parse, "missing CSV column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }

  std::vector<double> numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
      out.push_back(c < r.size() && !r[c].empty() ? std::stod(r[c]) : std::nan(""));
    }
    return out;
  }
};

CsvTable read_csv_table(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw SketchError(ErrorKind::Io, "cannot read " + p.string());
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (t.header.empty()) t.header = std::move(cells);
    else t.rows.push_back(std::move(cells));
  }
  return t;
}

nlohmann::json opt_json(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json estimate_json(const MCEstimate& e) {
  return {{"mean", e.mean}, {"std", e.std}, {"trials", e.trials}, {"ci_half_width", e.ci_half_width}};
}

struct PointDraws {
  std::vector<double> w;
  std::vector<double> direct;  // NaN when not computed
  std::vector<std::uint64_t> seeds;
  WSampler sampler = WSampler::Direct;
  bool shared_g = false;
};

PointDraws draw_point(Dim n, Dim k, Dim p, std::size_t trials, std::uint64_t seed, const ExperimentConfig& cfg,
                      Execution exec) {
  PointDraws out;
  out.seeds.resize(trials);
  for (std::size_t i = 0; i < trials; ++i) out.seeds[i] = derive_seed(seed, i);

  if (n <= kDenseLimitCheckMaxN) {
    // Small enough to run the range finder on M(t) with the same G.
    out.shared_g = true;
    const auto& seeds = out.seeds;
    const double t = cfg.t;
    out.direct.assign(trials, 0.0);
    auto& direct = out.direct;
    // Each trial writes only its own slot of `direct`.
    out.w = run_trials(
        trials,
        [&](std::size_t i) {
          const LimitCheck c = limit_residual_check(n, k, p, t, seeds[i]);
          direct[i] = c.direct;
          return c.via_w;
        },
        exec);
    return out;
  }

  WSampleOptions wopts;
  wopts.sampler = cfg.sampler;
  wopts.exec = exec;
  WSampleBatch batch = estimate_expected_W(n, k, p, trials, seed, wopts);
  out.w = std::move(batch.draws);
  out.direct.assign(trials, std::nan(""));
  out.sampler = batch.sampler;
  return out;
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string render_fig1_svg(const ExperimentConfig& cfg, const fs::path& draws_csv, const fs::path& points_csv) {
  const CsvTable dt = read_csv_table(draws_csv);
  const CsvTable pt = read_csv_table(points_csv);
  PlotSpec spec;
  spec.title = cfg.name + ": worst-case error W vs n (k " + cfg.k_rule.to_string() + ", p " + cfg.p_rule.to_string() + ")";
  spec.x_label = "n";
  spec.y_label = "error / sigma_{k+1}";
  spec.log_x = true;
  const auto xs = pt.numbers("n");
  std::vector<PlotSeries> series;
  series.push_back({"W draws", "#444444", PlotSeries::Style::Markers, dt.numbers("n"), dt.numbers("W")});
  series.push_back({"previous bound", "#d62728", PlotSeries::Style::Line, xs, pt.numbers("hmt")});
  series.push_back({"sharp upper", "#2ca02c", PlotSeries::Style::Line, xs, pt.numbers("sharp_hi")});
  series.push_back({"sharp lower", "#1f77b4", PlotSeries::Style::Line, xs, pt.numbers("sharp_lo")});
  series.push_back({"proxy", "#e6b800", PlotSeries::Style::Line, xs, pt.numbers("proxy")});
  return render_plot_svg(spec, series);
}

std::string render_fig2_svg(const ExperimentConfig& cfg, const fs::path& hist_csv) {
  const CsvTable ht = read_csv_table(hist_csv);
  const Dim n = cfg.n_grid.front();
  PlotSpec spec;
  spec.title = cfg.name + ": W at n=" + std::to_string(n) + ", k=" + std::to_string(cfg.k_rule.apply(n)) +
               ", p=" + std::to_string(cfg.p_rule.apply(n));
  spec.x_label = "W";
  spec.y_label = "count";
  return render_histogram_svg(spec, ht.numbers("lo"), ht.numbers("hi"), ht.numbers("count"));
}

ExperimentOutcome run_fig1(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (cfg.kind != ExperimentKind::Fig1FixedRatio && cfg.kind != ExperimentKind::Fig1FixedKp) {
    throw SketchError(ErrorKind::InvalidDims, "run_fig1 needs a fig1 experiment");
  }
  cfg.validate();
  Context ctx(cfg, opts);
  const fs::path draws_path = ctx.path("_draws.csv");
  const fs::path points_path = ctx.path("_points.csv");
  std::ofstream draws = ctx.open_csv(draws_path);
  std::ofstream points = ctx.open_csv(points_path);
  draws << "n,k,p,trial,seed,W,direct\n";
  points << "n,k,p,trials,mean,std,cv,min,max,ci,hmt,sharp_lo,sharp_hi,proxy,e_sigma_inv,e_ci,sampler\n";

  nlohmann::json point_json = nlohmann::json::array();
  for (std::size_t pi = 0; pi < cfg.n_grid.size(); ++pi) {
    const Dim n = cfg.n_grid[pi];
    const Dim k = cfg.k_rule.apply(n), p = cfg.p_rule.apply(n);
    ctx.log("n=" + std::to_string(n) + " k=" + std::to_string(k) + " p=" + std::to_string(p));

    const PointDraws d = draw_point(n, k, p, cfg.trials_per_point, derive_seed(cfg.seed, pi), cfg, opts.exec);
    const BoundSet b = bound_set(n, n, k, p, cfg.bounds_trials, derive_seed(cfg.seed, kBoundsStream, pi),
                                 cfg.source, opts.exec);
    const MCEstimate s = summarize(d.w);
    const auto [mn, mx] = std::minmax_element(d.w.begin(), d.w.end());
    const double cv = s.mean > 0 ? s.std / s.mean : 0.0;
    const std::string sampler = d.shared_g ? "shared_g" : to_string(d.sampler);

    for (std::size_t i = 0; i < d.w.size(); ++i) {
      draws << n << ',' << k << ',' << p << ',' << i << ',' << d.seeds[i] << ',' << format_double(d.w[i]) << ','
            << (std::isnan(d.direct[i]) ? "" : format_double(d.direct[i])) << '\n';
    }
    points << n << ',' << k << ',' << p << ',' << s.trials << ',' << format_double(s.mean) << ','
           << format_double(s.std) << ',' << format_double(cv) << ',' << format_double(*mn) << ','
           << format_double(*mx) << ',' << format_double(s.ci_half_width) << ',' << format_optional(b.hmt_upper)
           << ',' << format_optional(b.sharp_lower) << ',' << format_optional(b.sharp_upper) << ','
           << format_optional(b.proxy) << ',' << format_optional(b.e_sigma_inv) << ','
           << format_double(b.e_sigma_inv_ci) << ',' << sampler << '\n';
    draws.flush();
    points.flush();

    nlohmann::json pj = {{"n", n},
                         {"k", k},
                         {"p", p},
                         {"w", estimate_json(s)},
                         {"cv", cv},
                         {"min", *mn},
                         {"max", *mx},
                         {"sampler", sampler},
                         {"bounds", to_json(b)}};
    if (d.shared_g) {
      double gap = 0.0;
      for (std::size_t i = 0; i < d.w.size(); ++i) gap = std::max(gap, std::abs(d.direct[i] - d.w[i]) / d.w[i]);
      pj["t"] = cfg.t;
      pj["max_rel_gap_direct_vs_w"] = gap;
    }
    point_json.push_back(std::move(pj));
  }
  draws.close();
  points.close();

  ctx.write_text(ctx.path(".svg"), render_fig1_svg(cfg, draws_path, points_path));

  return ctx.finish({{"points", point_json}});
}

ExperimentOutcome run_fig2(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (cfg.kind != ExperimentKind::Fig2Variability) {
    throw SketchError(ErrorKind::InvalidDims, "run_fig2 needs a fig2_variability experiment");
  }
  cfg.validate();
  Context ctx(cfg, opts);
  const Dim n = cfg.n_grid.front();
  const Dim k = cfg.k_rule.apply(n), p = cfg.p_rule.apply(n);
  ctx.log("n=" + std::to_string(n) + " k=" + std::to_string(k) + " p=" + std::to_string(p) + ", " +
          std::to_string(cfg.trials_per_point) + " draws");

  WSampleOptions wopts;
  wopts.sampler = cfg.sampler;
  wopts.exec = opts.exec;
  const WSampleBatch batch = estimate_expected_W(n, k, p, cfg.trials_per_point, derive_seed(cfg.seed, 0), wopts);
  {
    std::ofstream draws = ctx.open_csv(ctx.path("_draws.csv"));
    write_w_batch_csv(draws, batch);
  }

  const Histogram h = histogram(batch.draws, kHistogramBins);
  const fs::path hist_path = ctx.path("_hist.csv");
  {
    std::ofstream hist = ctx.open_csv(hist_path);
    hist << "bin,lo,hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      const double lo = h.lo + h.bin_width() * static_cast<double>(i);
      const double hi = i + 1 == h.counts.size() ? h.hi : lo + h.bin_width();
      hist << i << ',' << format_double(lo) << ',' << format_double(hi) << ',' << h.counts[i] << '\n';
    }
  }

  ctx.write_text(ctx.path(".svg"), render_fig2_svg(cfg, hist_path));

  nlohmann::json summary = w_batch_summary_json(batch);
  summary["bins"] = kHistogramBins;
  summary["proxy"] = error_proxy(n, k, p);
  return ctx.finish(std::move(summary));
}

ExperimentOutcome run_lemma_suite_experiment(const ExperimentConfig& cfg, const RunOptions& opts, bool negate) {
  Context ctx(cfg, opts);
  LemmaOptions lopts;
  lopts.seed = cfg.seed;
  lopts.negate = negate;
  lopts.exec = opts.exec;
  ctx.log(negate ? "running negated suite" : "running suite");
  const LemmaReport report = run_lemma_suite(lopts);
  {
    std::ofstream csv = ctx.open_csv(ctx.path(".csv"));
    csv << "name,instances,failures,worst_slack\n";
    for (const auto& r : report.results) {
      csv << r.name << ',' << r.instances << ',' << r.failures << ',' << format_double(r.worst_slack) << '\n';
    }
  }
  ctx.outcome.passed = report.all_passed();
  return ctx.finish(to_json(report));
}

ExperimentOutcome run_bounds_table(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (cfg.kind != ExperimentKind::BoundsTable) {
    throw SketchError(ErrorKind::InvalidDims, "run_bounds_table needs a bounds_table experiment");
  }
  cfg.validate();
  Context ctx(cfg, opts);
  std::ofstream csv = ctx.open_csv(ctx.path(".csv"));
  csv << bound_set_csv_header() << ",proxy_pow_q3,sharp_ratio\n";
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t pi = 0; pi < cfg.n_grid.size(); ++pi) {
    const Dim n = cfg.n_grid[pi];
    const Dim k = cfg.k_rule.apply(n), p = cfg.p_rule.apply(n);
    ctx.log("n=" + std::to_string(n) + " k=" + std::to_string(k) + " p=" + std::to_string(p));
    const BoundSet b = bound_set(n, n, k, p, cfg.bounds_trials, derive_seed(cfg.seed, kBoundsStream, pi),
                                 cfg.source, opts.exec);
    std::optional<double> pow_q3, ratio;
    if (b.proxy) pow_q3 = std::pow(*b.proxy, 1.0 / 7.0);
    if (b.sharp_upper && b.sharp_lower && *b.sharp_lower > 0) ratio = *b.sharp_upper / *b.sharp_lower;
    csv << bound_set_csv_row(b) << ',' << format_optional(pow_q3) << ',' << format_optional(ratio) << '\n';
    csv.flush();
    nlohmann::json row = to_json(b);
    row["proxy_pow_q3"] = opt_json(pow_q3);
    row["sharp_ratio"] = opt_json(ratio);
    rows.push_back(std::move(row));
  }
  return ctx.finish({{"rows", rows}});
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  switch (cfg.kind) {
    case ExperimentKind::Fig1FixedRatio:
    case ExperimentKind::Fig1FixedKp: return run_fig1(cfg, opts);
    case ExperimentKind::Fig2Variability: return run_fig2(cfg, opts);
    case ExperimentKind::LemmaSuite: return run_lemma_suite_experiment(cfg, opts);
    case ExperimentKind::BoundsTable: return run_bounds_table(cfg, opts);
  }
  throw SketchError(ErrorKind::InvalidDims, "unknown experiment kind");
}

}  // namespace sketchbound
