#include <doctest.h>

#include "sketchbound/lemmas.hpp"

using namespace sketchbound;

namespace {

const LemmaReport& default_report() {
  static const LemmaReport report = run_lemma_suite();
  return report;
}

}  // namespace

TEST_CASE("lemma suite passes at the default seed") {
  const LemmaReport& r = default_report();
  for (const auto& lemma : r.results) {
    INFO(lemma.name << " worst slack " << lemma.worst_slack);
    CHECK(lemma.failures == 0);
    CHECK(lemma.instances >= 1);
  }
  CHECK(r.all_passed());
  for (const char* name : {"chaining", "single_vector_monotonicity", "multi_column_monotonicity",
                           "rotational_invariance_ks", "reduced_w_identity", "sandwich_l_w", "power_jensen",
                           "svd_identity", "polar_t2_scaling", "wishart_trace", "extreme_singular_values",
                           "pseudo_inverse_bracket"}) {
    INFO(name);
    CHECK(r.find(name) != nullptr);
  }
  CHECK(r.find("chaining")->instances >= 100);
  CHECK(r.find("reduced_w_identity")->instances == 500);
}

TEST_CASE("negative control produces monotonicity failures") {
  LemmaOptions opts;
  opts.negate = true;
  const LemmaReport r = run_lemma_suite(opts);
  CHECK_FALSE(r.all_passed());
  CHECK(r.find("single_vector_monotonicity")->failures > 0);
  CHECK(r.find("multi_column_monotonicity")->failures > 0);
  CHECK(r.find("worst_case_monotonicity_in_t")->failures > 0);
  CHECK(r.find("chaining")->failures == 0);
}

TEST_CASE("report json") {
  const auto j = to_json(default_report());
  CHECK(j["passed"] == true);
  CHECK(j["lemmas"].size() == default_report().results.size());
  const auto& first = j["lemmas"][0];
  for (const char* key : {"name", "instances", "failures", "worst_slack"}) CHECK(first.contains(key));
}

TEST_CASE("suite is deterministic and schedule independent") {
  LemmaOptions serial;
  serial.exec = Execution::Serial;
  CHECK(to_json(run_lemma_suite(serial)).dump() == to_json(default_report()).dump());
}
