#pragma once

#include "sketchbound/bounds.hpp"
#include "sketchbound/worstcase.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sketchbound {

/// k or p as a function of n: "fixed:100" or "ratio:0.01" (rounded to nearest).
struct SizeRule {
  enum class Kind { Fixed, Ratio };
  Kind kind = Kind::Fixed;
  double value = 0.0;

  Dim apply(Dim n) const;
  std::string to_string() const;
  static SizeRule parse(const std::string& text);
};

enum class ExperimentKind { Fig1FixedRatio, Fig1FixedKp, Fig2Variability, LemmaSuite, BoundsTable };

const char* to_string(ExperimentKind kind);

struct ExperimentConfig {
  std::string name;  // section header, e.g. "fig2_variability.a"
  ExperimentKind kind = ExperimentKind::Fig1FixedRatio;
  std::vector<Dim> n_grid;
  SizeRule k_rule;
  SizeRule p_rule;
  std::size_t trials_per_point = 20;
  std::uint64_t seed = 0;
  double t = 1e6;
  std::filesystem::path output_dir = "out";
  std::size_t bounds_trials = kDefaultSigmaInvTrials;
  SigmaInvSource source = SigmaInvSource::MonteCarlo;
  WSampler sampler = WSampler::Auto;

  /// Throws SketchError(Parse) describing the first violated constraint.
  void validate() const;
  nlohmann::json to_json() const;
};

/// TOML-style subset: `key = value` lines, `[section]` headers, '#' comments.
/// Keys before the first section are defaults for every section. A section
/// name is an experiment kind optionally followed by ".label". Values are
/// numbers, bare or quoted strings, or bracketed comma-separated number lists.
/// Relative output_dir values are resolved against `base_dir`.
std::vector<ExperimentConfig> parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
std::vector<ExperimentConfig> load_config(const std::filesystem::path& path);

}  // namespace sketchbound
