#pragma once

#include "sketchbound/config.hpp"
#include "sketchbound/parallel.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sketchbound {

struct RunOptions {
  Execution exec = Execution::Parallel;
  /// Text after "# generated: " on the first line of every CSV; the current
  /// UTC time when empty. Nothing else in the outputs depends on the clock.
  std::string timestamp;
  /// Overrides cfg.output_dir when non-empty.
  std::filesystem::path output_dir;
  /// Progress messages; silent when null.
  std::ostream* log = nullptr;
};

struct ExperimentOutcome {
  std::string name;
  ExperimentKind kind = ExperimentKind::Fig1FixedRatio;
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;  // also written as <name>.json
  bool passed = true;      // false only when a lemma suite reports failures
};

/// fig1_*: W draws per grid point plus the bound overlays. Points with
/// n <= 4000 draw a shared G and also record ||f(M(t), G)|| ("direct");
/// larger points use the W sampler. Writes <name>_draws.csv,
/// <name>_points.csv, <name>.json and <name>.svg.
ExperimentOutcome run_fig1(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// fig2_variability: W draws at a single (n, k, p) and a 50-bin histogram. Writes
/// <name>_draws.csv, <name>_hist.csv, <name>.json and <name>.svg.
ExperimentOutcome run_fig2(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Property suite; writes <name>.csv and <name>.json.
ExperimentOutcome run_lemma_suite_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {},
                                             bool negate = false);

/// One BoundSet per grid point plus proxy^(1/7) (power trick, q = 3) and
/// sharp_upper / sharp_lower. Writes <name>.csv and <name>.json.
ExperimentOutcome run_bounds_table(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// The plots are rendered only from CSVs on disk; these are the renderers
/// run_fig1 / run_fig2 use.
std::string render_fig1_svg(const ExperimentConfig& cfg, const std::filesystem::path& draws_csv,
                            const std::filesystem::path& points_csv);
std::string render_fig2_svg(const ExperimentConfig& cfg, const std::filesystem::path& hist_csv);

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

inline constexpr std::size_t kHistogramBins = 50;

/// "2026-01-31T12:00:00Z"
std::string utc_timestamp();

}  // namespace sketchbound
