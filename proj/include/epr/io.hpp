// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON scenario and report files (schema_version 1).
//
// Complex numbers are [re, im] arrays and matrices are row-major nested
// arrays. Parsing is strict: unknown or missing fields are errors. Report
// numbers are rounded to 15 significant digits on emission.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "epr/error.hpp"
#include "epr/lab.hpp"
#include "epr/linalg.hpp"

namespace epr::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolName = "epr";
inline constexpr const char* kToolVersion = "1.0.0";

/// Rounds to 15 significant digits; -0 becomes 0.
inline double round15(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

// ---------------------------------------------------------------------------
// Strict field access

namespace detail {

inline void expect_object(const json& j, const std::string& ctx, std::initializer_list<const char*> required,
                          std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    if (!j.contains(k)) throw ParseError(ctx + ": missing field '" + k + "'");
    allowed.insert(k);
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ParseError(ctx + ": unknown field '" + item.key() + "'");
}

inline double number(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw ParseError(ctx + ": expected a number");
  return j.get<double>();
}

inline std::int64_t integer(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw ParseError(ctx + ": expected an integer");
  return j.get<std::int64_t>();
}

inline std::uint64_t unsigned_integer(const json& j, const std::string& ctx) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ParseError(ctx + ": expected a nonnegative integer");
}

inline bool boolean(const json& j, const std::string& ctx) {
  if (!j.is_boolean()) throw ParseError(ctx + ": expected a boolean");
  return j.get<bool>();
}

inline std::string string(const json& j, const std::string& ctx) {
  if (!j.is_string()) throw ParseError(ctx + ": expected a string");
  return j.get<std::string>();
}

inline const json& array(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ParseError(ctx + ": expected an array");
  return j;
}

}  // namespace detail

inline json to_json(Complex z, bool rounded = false) {
  return rounded ? json::array({round15(z.real()), round15(z.imag())}) : json::array({z.real(), z.imag()});
}

inline Complex complex_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2) throw ParseError(ctx + ": complex numbers are [re, im] arrays");
  return {detail::number(j[0], ctx + "[0]"), detail::number(j[1], ctx + "[1]")};
}

inline json to_json(const ComplexMatrix& m, bool rounded = false) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j), rounded));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const json& j, Index n, const std::string& ctx) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n)
    throw ParseError(ctx + ": expected " + std::to_string(n) + " rows");
  ComplexMatrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rctx = ctx + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != n)
      throw ParseError(rctx + ": expected " + std::to_string(n) + " entries");
    for (Index c = 0; c < n; ++c)
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], rctx + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline json to_json(const ComplexVector& v, bool rounded = false) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i), rounded));
  return out;
}

inline ComplexVector vector_from_json(const json& j, Index n, const std::string& ctx) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n)
    throw ParseError(ctx + ": expected " + std::to_string(n) + " amplitudes");
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i)
    v(i) = complex_from_json(j[static_cast<std::size_t>(i)], ctx + "[" + std::to_string(i) + "]");
  return v;
}

inline bool same_matrix(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

// ---------------------------------------------------------------------------
// Scenario files

struct ScenarioFile {
  int schema_version = kSchemaVersion;
  std::string label;
  Index factor_dim = 0;
  ComplexMatrix matrix_a;
  ComplexMatrix matrix_b;
  double alpha = 1.0;
  std::optional<ComplexMatrix> matrix_c;
  ComplexVector state;
};

/// Structural parse only; domain invariants are checked by `to_scenario`.
inline ScenarioFile parse_scenario(const json& j) {
  detail::expect_object(j, "scenario", {"schema_version", "label", "factor_dim", "matrix_a", "matrix_b", "alpha", "state"},
                        {"matrix_c"});
  ScenarioFile f;
  const std::int64_t version = detail::integer(j["schema_version"], "schema_version");
  if (version != kSchemaVersion) throw ParseError("schema_version: unsupported version " + std::to_string(version));
  f.schema_version = static_cast<int>(version);
  f.label = detail::string(j["label"], "label");
  const std::int64_t n = detail::integer(j["factor_dim"], "factor_dim");
  if (n < 1 || n > 8) throw ParseError("factor_dim: must be between 1 and 8");
  f.factor_dim = static_cast<Index>(n);
  f.matrix_a = matrix_from_json(j["matrix_a"], f.factor_dim, "matrix_a");
  f.matrix_b = matrix_from_json(j["matrix_b"], f.factor_dim, "matrix_b");
  if (j.contains("matrix_c")) f.matrix_c = matrix_from_json(j["matrix_c"], f.factor_dim, "matrix_c");
  f.alpha = detail::number(j["alpha"], "alpha");
  f.state = vector_from_json(j["state"], f.factor_dim * f.factor_dim, "state");
  return f;
}

inline ScenarioFile parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

inline json to_json(const ScenarioFile& f) {
  json j{{"schema_version", f.schema_version}, {"label", f.label},        {"factor_dim", f.factor_dim},
         {"matrix_a", to_json(f.matrix_a)},      {"matrix_b", to_json(f.matrix_b)}, {"alpha", f.alpha},
         {"state", to_json(f.state)}};
  if (f.matrix_c) j["matrix_c"] = to_json(*f.matrix_c);
  return j;
}

inline Scenario to_scenario(const ScenarioFile& f) {
  return make_scenario(f.label, f.matrix_a, f.matrix_b, f.matrix_c, f.alpha, f.state);
}

/// Reads a file into a string. Throws std::ios_base::failure when it cannot
/// be opened.
inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Report files

/// Resolved inputs echoed into every report.
struct ScenarioEcho {
  Index factor_dim = 0;
  double alpha = 1.0;
  ComplexMatrix matrix_a;
  ComplexMatrix matrix_b;
  ComplexMatrix matrix_c;
  ComplexVector state;

  static ScenarioEcho from(const Scenario& sc) {
    return {sc.factor_dim(),         sc.alpha(),           sc.obs_a().matrix(),
            sc.obs_b().matrix(),     sc.obs_c().matrix(),  sc.initial_state().amplitudes()};
  }

  bool operator==(const ScenarioEcho& o) const {
    return factor_dim == o.factor_dim && alpha == o.alpha && same_matrix(matrix_a, o.matrix_a) &&
           same_matrix(matrix_b, o.matrix_b) && same_matrix(matrix_c, o.matrix_c) && same_matrix(state, o.state);
  }
};

struct RunReportFile {
  int schema_version = kSchemaVersion;
  std::string label;
  ScenarioEcho inputs;
  EprReport report;
  std::optional<ShotRecord> shots;
  std::optional<EmpiricalComparison> comparison;
  std::string tool = kToolName;
  std::string tool_version = kToolVersion;

  bool operator==(const RunReportFile&) const = default;
};

inline RunReportFile make_report_file(const Scenario& sc, EprReport report, std::optional<ShotRecord> shots = {},
                                      std::optional<EmpiricalComparison> comparison = {}) {
  RunReportFile f;
  f.label = sc.label();
  f.inputs = ScenarioEcho::from(sc);
  f.report = std::move(report);
  f.shots = std::move(shots);
  f.comparison = std::move(comparison);
  return f;
}

namespace detail {

inline json summary_json(const PredictionSummary& s) { return {{"mean", round15(s.mean)}, {"stdev", round15(s.stdev)}}; }

inline PredictionSummary summary_from(const json& j, const std::string& ctx) {
  expect_object(j, ctx, {"mean", "stdev"});
  return {number(j["mean"], ctx + ".mean"), number(j["stdev"], ctx + ".stdev")};
}

inline json audit_json(const UncertaintyReport& r) {
  return {{"delta_a", round15(r.delta_a)}, {"delta_b", round15(r.delta_b)}, {"rhs", round15(r.rhs)},
          {"satisfied", r.satisfied}};
}

inline UncertaintyReport audit_from(const json& j, const std::string& ctx) {
  expect_object(j, ctx, {"delta_a", "delta_b", "rhs", "satisfied"});
  return {number(j["delta_a"], ctx + ".delta_a"), number(j["delta_b"], ctx + ".delta_b"), number(j["rhs"], ctx + ".rhs"),
          boolean(j["satisfied"], ctx + ".satisfied")};
}

inline json outcomes_json(const std::vector<Outcome>& outcomes) {
  json arr = json::array();
  for (const auto& o : outcomes) arr.push_back({{"value", round15(o.value)}, {"probability", round15(o.probability)}});
  return arr;
}

inline std::vector<Outcome> outcomes_from(const json& j, const std::string& ctx) {
  std::vector<Outcome> out;
  std::size_t i = 0;
  for (const auto& o : array(j, ctx)) {
    const std::string c = ctx + "[" + std::to_string(i++) + "]";
    expect_object(o, c, {"value", "probability"});
    out.push_back({number(o["value"], c + ".value"), number(o["probability"], c + ".probability")});
  }
  return out;
}

inline json check_json(const FrequencyCheck& c) {
  return {{"key", c.key},
          {"analytic", round15(c.analytic)},
          {"empirical", round15(c.empirical)},
          {"deviation", round15(c.deviation)},
          {"bound", round15(c.bound)},
          {"within", c.within}};
}

inline FrequencyCheck check_from(const json& j, const std::string& ctx) {
  expect_object(j, ctx, {"key", "analytic", "empirical", "deviation", "bound", "within"});
  return {string(j["key"], ctx + ".key"),          number(j["analytic"], ctx + ".analytic"),
          number(j["empirical"], ctx + ".empirical"), number(j["deviation"], ctx + ".deviation"),
          number(j["bound"], ctx + ".bound"),        boolean(j["within"], ctx + ".within")};
}

}  // namespace detail

inline json to_json(const EprReport& r) {
  using namespace detail;
  json per_sum = json::array();
  for (const auto& b : r.per_sum) {
    per_sum.push_back({{"sum", round15(b.sum)},
                       {"probability", round15(b.probability)},
                       {"a1_distribution", outcomes_json(b.a1_distribution.support)},
                       {"a1", summary_json(b.a1)},
                       {"a2", summary_json(b.a2)},
                       {"b1", summary_json(b.b1)},
                       {"b2", summary_json(b.b2)},
                       {"c1_mean", round15(b.c1_mean)},
                       {"c2_mean", round15(b.c2_mean)},
                       {"theorem2", {{"mean_residual", round15(b.theorem2_mean_residual)},
                                     {"stdev_gap", round15(b.theorem2_stdev_gap)}}},
                       {"audit1", audit_json(b.audit1)},
                       {"audit2", audit_json(b.audit2)},
                       {"schmidt_rank", b.schmidt_rank}});
  }
  json chains = json::array();
  for (const auto& c : r.chains) {
    chains.push_back({{"sum", round15(c.sum)},
                      {"a1", round15(c.a1)},
                      {"a2", round15(c.a2)},
                      {"conditional_probability", round15(c.conditional_probability)},
                      {"post_state", {{"basis_label", {round15(c.a1), round15(c.a2)}},
                                      {"overlap", round15(c.basis_overlap)},
                                      {"phase", {round15(c.phase_re), round15(c.phase_im)}}}},
                      {"a2_value", round15(c.a2_value)},
                      {"a2_stdev", round15(c.a2_stdev)},
                      {"audit", audit_json(c.audit)}});
  }
  return {{"sum_spectrum", outcomes_json(r.sum_spectrum.outcomes)}, {"per_sum", per_sum}, {"chains", chains}};
}

inline EprReport report_from_json(const json& j) {
  using namespace detail;
  expect_object(j, "report", {"sum_spectrum", "per_sum", "chains"});
  EprReport r;
  r.sum_spectrum.outcomes = outcomes_from(j["sum_spectrum"], "report.sum_spectrum");
  std::size_t i = 0;
  for (const auto& b : array(j["per_sum"], "report.per_sum")) {
    const std::string ctx = "report.per_sum[" + std::to_string(i++) + "]";
    expect_object(b, ctx,
                  {"sum", "probability", "a1_distribution", "a1", "a2", "b1", "b2", "c1_mean", "c2_mean", "theorem2",
                   "audit1", "audit2", "schmidt_rank"});
    SumBranchReport s;
    s.sum = number(b["sum"], ctx + ".sum");
    s.probability = number(b["probability"], ctx + ".probability");
    s.a1_distribution.given_sum = s.sum;
    s.a1_distribution.support = outcomes_from(b["a1_distribution"], ctx + ".a1_distribution");
    s.a1 = summary_from(b["a1"], ctx + ".a1");
    s.a2 = summary_from(b["a2"], ctx + ".a2");
    s.b1 = summary_from(b["b1"], ctx + ".b1");
    s.b2 = summary_from(b["b2"], ctx + ".b2");
    s.c1_mean = number(b["c1_mean"], ctx + ".c1_mean");
    s.c2_mean = number(b["c2_mean"], ctx + ".c2_mean");
    const json& t2 = b["theorem2"];
    expect_object(t2, ctx + ".theorem2", {"mean_residual", "stdev_gap"});
    s.theorem2_mean_residual = number(t2["mean_residual"], ctx + ".theorem2.mean_residual");
    s.theorem2_stdev_gap = number(t2["stdev_gap"], ctx + ".theorem2.stdev_gap");
    s.audit1 = audit_from(b["audit1"], ctx + ".audit1");
    s.audit2 = audit_from(b["audit2"], ctx + ".audit2");
    s.schmidt_rank = static_cast<Index>(integer(b["schmidt_rank"], ctx + ".schmidt_rank"));
    r.per_sum.push_back(std::move(s));
  }
  i = 0;
  for (const auto& c : array(j["chains"], "report.chains")) {
    const std::string ctx = "report.chains[" + std::to_string(i++) + "]";
    expect_object(c, ctx, {"sum", "a1", "a2", "conditional_probability", "post_state", "a2_value", "a2_stdev", "audit"});
    ChainReport cr;
    cr.sum = number(c["sum"], ctx + ".sum");
    cr.a1 = number(c["a1"], ctx + ".a1");
    cr.a2 = number(c["a2"], ctx + ".a2");
    cr.conditional_probability = number(c["conditional_probability"], ctx + ".conditional_probability");
    const json& ps = c["post_state"];
    expect_object(ps, ctx + ".post_state", {"basis_label", "overlap", "phase"});
    const json& label = ps["basis_label"];
    if (!label.is_array() || label.size() != 2 || number(label[0], ctx) != cr.a1 || number(label[1], ctx) != cr.a2)
      throw ParseError(ctx + ".post_state.basis_label: must equal [a1, a2]");
    cr.basis_overlap = number(ps["overlap"], ctx + ".post_state.overlap");
    const Complex phase = complex_from_json(ps["phase"], ctx + ".post_state.phase");
    cr.phase_re = phase.real();
    cr.phase_im = phase.imag();
    cr.a2_value = number(c["a2_value"], ctx + ".a2_value");
    cr.a2_stdev = number(c["a2_stdev"], ctx + ".a2_stdev");
    cr.audit = audit_from(c["audit"], ctx + ".audit");
    r.chains.push_back(cr);
  }
  return r;
}

inline json to_json(const ShotRecord& r) {
  json counts = json::object();
  for (const auto& [k, v] : r.counts) counts[k] = v;
  json empirical = json::object();
  for (const auto& [k, v] : r.empirical) empirical[k] = round15(v);
  return {{"seed", r.seed}, {"shots", r.shots}, {"counts", counts}, {"empirical", empirical}};
}

inline ShotRecord shot_record_from_json(const json& j) {
  using namespace detail;
  expect_object(j, "shots", {"seed", "shots", "counts", "empirical"});
  ShotRecord r;
  r.seed = unsigned_integer(j["seed"], "shots.seed");
  r.shots = unsigned_integer(j["shots"], "shots.shots");
  if (!j["counts"].is_object()) throw ParseError("shots.counts: expected an object");
  for (const auto& item : j["counts"].items()) r.counts[item.key()] = unsigned_integer(item.value(), "shots.counts");
  if (!j["empirical"].is_object()) throw ParseError("shots.empirical: expected an object");
  for (const auto& item : j["empirical"].items()) r.empirical[item.key()] = number(item.value(), "shots.empirical");
  return r;
}

inline json to_json(const EmpiricalComparison& c) {
  json paths = json::array();
  for (const auto& p : c.paths) paths.push_back(detail::check_json(p));
  json sums = json::array();
  for (const auto& s : c.sums) sums.push_back(detail::check_json(s));
  return {{"max_abs_deviation", round15(c.max_abs_deviation)},
          {"within_3sigma", c.within_3sigma},
          {"paths", paths},
          {"sums", sums}};
}

inline EmpiricalComparison comparison_from_json(const json& j) {
  using namespace detail;
  expect_object(j, "comparison", {"max_abs_deviation", "within_3sigma", "paths", "sums"});
  EmpiricalComparison c;
  c.max_abs_deviation = number(j["max_abs_deviation"], "comparison.max_abs_deviation");
  c.within_3sigma = boolean(j["within_3sigma"], "comparison.within_3sigma");
  std::size_t i = 0;
  for (const auto& p : array(j["paths"], "comparison.paths"))
    c.paths.push_back(check_from(p, "comparison.paths[" + std::to_string(i++) + "]"));
  i = 0;
  for (const auto& s : array(j["sums"], "comparison.sums"))
    c.sums.push_back(check_from(s, "comparison.sums[" + std::to_string(i++) + "]"));
  return c;
}

inline json to_json(const RunReportFile& f) {
  json inputs{{"factor_dim", f.inputs.factor_dim},
              {"alpha", round15(f.inputs.alpha)},
              {"matrix_a", to_json(f.inputs.matrix_a, true)},
              {"matrix_b", to_json(f.inputs.matrix_b, true)},
              {"matrix_c", to_json(f.inputs.matrix_c, true)},
              {"state", to_json(f.inputs.state, true)}};
  json j{{"schema_version", f.schema_version},
         {"label", f.label},
         {"inputs", inputs},
         {"report", to_json(f.report)},
         {"metadata", {{"tool", f.tool}, {"version", f.tool_version}}}};
  if (f.shots) j["shots"] = to_json(*f.shots);
  if (f.comparison) j["comparison"] = to_json(*f.comparison);
  return j;
}

inline RunReportFile report_file_from_json(const json& j) {
  using namespace detail;
  expect_object(j, "report file", {"schema_version", "label", "inputs", "report", "metadata"}, {"shots", "comparison"});
  RunReportFile f;
  const std::int64_t version = integer(j["schema_version"], "schema_version");
  if (version != kSchemaVersion) throw ParseError("schema_version: unsupported version " + std::to_string(version));
  f.schema_version = static_cast<int>(version);
  f.label = string(j["label"], "label");

  const json& in = j["inputs"];
  expect_object(in, "inputs", {"factor_dim", "alpha", "matrix_a", "matrix_b", "matrix_c", "state"});
  const std::int64_t n = integer(in["factor_dim"], "inputs.factor_dim");
  if (n < 1) throw ParseError("inputs.factor_dim: must be positive");
  f.inputs.factor_dim = static_cast<Index>(n);
  f.inputs.alpha = number(in["alpha"], "inputs.alpha");
  f.inputs.matrix_a = matrix_from_json(in["matrix_a"], f.inputs.factor_dim, "inputs.matrix_a");
  f.inputs.matrix_b = matrix_from_json(in["matrix_b"], f.inputs.factor_dim, "inputs.matrix_b");
  f.inputs.matrix_c = matrix_from_json(in["matrix_c"], f.inputs.factor_dim, "inputs.matrix_c");
  f.inputs.state = vector_from_json(in["state"], f.inputs.factor_dim * f.inputs.factor_dim, "inputs.state");

  f.report = report_from_json(j["report"]);
  if (j.contains("shots")) f.shots = shot_record_from_json(j["shots"]);
  if (j.contains("comparison")) f.comparison = comparison_from_json(j["comparison"]);

  const json& meta = j["metadata"];
  expect_object(meta, "metadata", {"tool", "version"});
  f.tool = string(meta["tool"], "metadata.tool");
  f.tool_version = string(meta["version"], "metadata.version");
  return f;
}

inline RunReportFile parse_report_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return report_file_from_json(j);
}

/// Pretty-printed JSON with a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace epr::io
