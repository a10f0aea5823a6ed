// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "epr/io.hpp"
#include "support/generators.hpp"

namespace epr {
namespace {

using io::json;

std::string source_path(const std::string& rel) { return std::string(EPR_SOURCE_DIR) + "/" + rel; }

json pauli_json() {
  return json::parse(R"({
    "schema_version": 1, "label": "t", "factor_dim": 2,
    "matrix_a": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
    "matrix_b": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]],
    "alpha": 2,
    "state": [[0.5, 0], [0.5, 0], [0.5, 0], [0.5, 0]]
  })");
}

TEST(Round15, KeepsFifteenDigits) {
  EXPECT_EQ(io::round15(0.1 + 0.2), 0.3);
  EXPECT_EQ(io::round15(1.0 / 3.0), 0.333333333333333);
  EXPECT_EQ(io::round15(0.0), 0.0);
  EXPECT_EQ(io::round15(-2.5e-300), -2.5e-300);
}

TEST(ParseScenario, AcceptsMinimalFileAndDerivesC) {
  const io::ScenarioFile f = io::parse_scenario(pauli_json());
  EXPECT_EQ(f.factor_dim, 2);
  EXPECT_FALSE(f.matrix_c.has_value());
  const Scenario sc = io::to_scenario(f);
  EXPECT_LE(max_abs(sc.obs_c().matrix() - pauli_y()), 1e-15);
}

TEST(ParseScenario, RejectsUnknownAndMissingFields) {
  json j = pauli_json();
  j["alpah"] = 2;
  EXPECT_THROW(io::parse_scenario(j), ParseError);
  json k = pauli_json();
  k.erase("alpha");
  EXPECT_THROW(io::parse_scenario(k), ParseError);
}

TEST(ParseScenario, RejectsBadShapesAndTypes) {
  json j = pauli_json();
  j["matrix_a"][0].push_back(json::array({0, 0}));
  EXPECT_THROW(io::parse_scenario(j), ParseError);

  j = pauli_json();
  j["state"].erase(0);
  EXPECT_THROW(io::parse_scenario(j), ParseError);

  j = pauli_json();
  j["state"][0] = json::array({0.5, 0.0, 1.0});
  EXPECT_THROW(io::parse_scenario(j), ParseError);

  j = pauli_json();
  j["alpha"] = "two";
  EXPECT_THROW(io::parse_scenario(j), ParseError);

  j = pauli_json();
  j["schema_version"] = 2;
  EXPECT_THROW(io::parse_scenario(j), ParseError);

  j = pauli_json();
  j["factor_dim"] = 0;
  EXPECT_THROW(io::parse_scenario(j), ParseError);

  EXPECT_THROW(io::parse_scenario_text("{ not json"), ParseError);
  EXPECT_THROW(io::parse_scenario(json::array()), ParseError);
}

TEST(ParseScenario, InvariantsAreCheckedOnConversion) {
  json j = pauli_json();
  j["matrix_a"][0][1] = json::array({0.3, 0.0});
  const io::ScenarioFile f = io::parse_scenario(j);
  try {
    io::to_scenario(f);
    FAIL() << "expected an invariant violation";
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.what_field(), "matrix_a");
  }
}

TEST(ScenarioFile, RoundTrip) {
  for (const char* name : {"scenarios/pauli_epr.json", "scenarios/pauli_uniform.json", "scenarios/qutrit_sum.json"}) {
    const io::ScenarioFile f = io::parse_scenario_text(io::read_file(source_path(name)));
    const io::ScenarioFile g = io::parse_scenario(io::to_json(f));
    EXPECT_EQ(io::to_json(f), io::to_json(g)) << name;
  }
}

TEST(ReadFile, MissingFileThrowsIoFailure) {
  EXPECT_THROW(io::read_file(source_path("tests/fixtures/does_not_exist.json")), std::ios_base::failure);
}

// Emitted numbers carry 15 significant digits, so equality after one
// emission is the round-trip contract: parse(emit(x)) re-emits identically
// and re-parses to an equal structure.
void expect_round_trip(const io::RunReportFile& original) {
  const std::string text = io::dump(io::to_json(original));
  const io::RunReportFile parsed = io::parse_report_text(text);
  EXPECT_EQ(io::dump(io::to_json(parsed)), text);
  EXPECT_TRUE(parsed == io::parse_report_text(io::dump(io::to_json(parsed))));
  EXPECT_EQ(parsed.label, original.label);
  EXPECT_EQ(parsed.report.per_sum.size(), original.report.per_sum.size());
  EXPECT_EQ(parsed.report.chains.size(), original.report.chains.size());
}

TEST(RunReportFile, RoundTripsAnalysisAndSamples) {
  const Scenario sc = build_pauli_scenario(0.0, std::sqrt(0.8), std::sqrt(0.2), 0.0, "epr");
  expect_round_trip(io::make_report_file(sc, run_epr_analysis(sc)));

  const ShotRecord rec = sample_chain(sc, 1000, 42);
  const EmpiricalComparison cmp = compare_empirical(rec, sc);
  const io::RunReportFile with_shots = io::make_report_file(sc, run_epr_analysis(sc), rec, cmp);
  expect_round_trip(with_shots);
  const io::RunReportFile parsed = io::parse_report_text(io::dump(io::to_json(with_shots)));
  ASSERT_TRUE(parsed.shots.has_value());
  EXPECT_EQ(*parsed.shots, rec);
  EXPECT_EQ(parsed.shots->seed, 42u);
}

TEST(RunReportFile, RoundTripsRandomScenarios) {
  testing::Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 3;
    const Scenario sc = make_scenario("random", testing::random_nondegenerate_hermitian(rng, n),
                                      testing::random_hermitian(rng, n), std::nullopt, 1.0,
                                      testing::random_vector(rng, n * n));
    const ShotRecord rec = sample_chain(sc, 200, static_cast<std::uint64_t>(trial));
    expect_round_trip(io::make_report_file(sc, run_epr_analysis(sc), rec, compare_empirical(rec, sc)));
  }
}

TEST(RunReportFile, MetadataIsSegregated) {
  const Scenario sc = build_pauli_scenario(0.5, 0.5, 0.5, 0.5);
  const json j = io::to_json(io::make_report_file(sc, run_epr_analysis(sc)));
  EXPECT_EQ(j["metadata"]["tool"], "epr");
  EXPECT_TRUE(j["metadata"].contains("version"));
  EXPECT_FALSE(j["report"].contains("version"));
}

TEST(RunReportFile, StrictParsing) {
  const Scenario sc = build_pauli_scenario(0.5, 0.5, 0.5, 0.5);
  json j = io::to_json(io::make_report_file(sc, run_epr_analysis(sc)));
  json extra = j;
  extra["report"]["extra"] = 1;
  EXPECT_THROW(io::report_file_from_json(extra), ParseError);
  json missing = j;
  missing.erase("metadata");
  EXPECT_THROW(io::report_file_from_json(missing), ParseError);
}

}  // namespace
}  // namespace epr
