#pragma once

#include "sketchbound/parallel.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sketchbound {

/// Outcome of one property check. Slack is (allowed - observed) per instance,
/// so a negative value is a failure; worst_slack is the minimum over instances.
struct LemmaResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double worst_slack = 0.0;
  std::string detail;
};

struct LemmaOptions {
  std::uint64_t seed = 20240229;
  /// Negative control: monotonicity checks compare the two spectra the wrong
  /// way round, which must produce failures.
  bool negate = false;
  Execution exec = Execution::Parallel;
};

struct LemmaReport {
  std::uint64_t seed = 0;
  bool negated = false;
  std::vector<LemmaResult> results;

  bool all_passed() const;
  std::size_t total_failures() const;
  const LemmaResult* find(const std::string& name) const;
};

LemmaReport run_lemma_suite(const LemmaOptions& opts = {});

nlohmann::json to_json(const LemmaReport& report);

}  // namespace sketchbound
