// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// `epr` command-line front end. Kept in a header so the test suites can
// drive it in-process.
//
//   epr verify <file>
//   epr analyze <file> [--out <file>]
//   epr sample <file> --shots <n> [--seed <u64>] [--out <file>]
//   epr demo-pauli --amplitudes re,im,re,im,re,im,re,im [--out <file>]

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ios>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epr/error.hpp"
#include "epr/io.hpp"
#include "epr/lab.hpp"

namespace epr::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kInvariant = 3,
  kImpossible = 4,
  kIo = 5,
};

namespace detail {

inline io::ScenarioFile load_scenario_file(const std::string& path) {
  return io::parse_scenario_text(io::read_file(path));
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::ios_base::failure("cannot write '" + out_path + "'");
  file << text;
  if (!file) throw std::ios_base::failure("write to '" + out_path + "' failed");
}

inline std::string sci(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << x;
  return s.str();
}

inline void row(std::ostream& out, const std::string& name, double residual, double limit) {
  out << "  " << std::left << std::setw(26) << name << std::right << std::setw(12) << sci(residual) << std::setw(12)
      << sci(limit) << (residual <= limit ? "  ok" : "  FAIL") << "\n";
}

inline int cmd_verify(const std::string& path, std::ostream& out, std::ostream& err) {
  const io::ScenarioFile file = load_scenario_file(path);
  const Scenario sc = io::to_scenario(file);

  const ComplexMatrix derived = extract_c(file.matrix_a, file.matrix_b, file.alpha);
  const Theorem1Report t1 = verify_theorem1(sc.obs_a(), sc.obs_b(), sc.alpha());
  const double t1_limit = 1e-10 * t1.c_norm;

  out << "scenario: " << sc.label() << " (N = " << sc.factor_dim() << ", alpha = " << sc.alpha() << ")\n";
  out << "  " << std::left << std::setw(26) << "check" << std::right << std::setw(12) << "residual" << std::setw(12)
      << "limit" << "\n";
  row(out, "matrix_a hermiticity", max_abs(file.matrix_a - file.matrix_a.adjoint()), hermiticity_tolerance(file.matrix_a));
  row(out, "matrix_b hermiticity", max_abs(file.matrix_b - file.matrix_b.adjoint()), hermiticity_tolerance(file.matrix_b));
  if (file.matrix_c) {
    row(out, "matrix_c hermiticity", max_abs(*file.matrix_c - file.matrix_c->adjoint()),
        hermiticity_tolerance(*file.matrix_c));
    row(out, "com1 consistency", max_abs(derived - *file.matrix_c), kCom1Tolerance);
  }
  row(out, "trace of C", t1.trace_residual, t1_limit);
  row(out, "diagonal of C in A basis", t1.max_diag_residual, t1_limit);
  row(out, "state normalization", std::abs(sc.initial_state().amplitudes().norm() - 1.0), 1e-10);

  if (!t1.holds()) {
    err << "invariant violation: C = [A,B]/(i alpha) has a nonzero trace or eigenbasis diagonal\n";
    return kInvariant;
  }
  out << "result: ok\n";
  return kOk;
}

inline int cmd_analyze(const std::string& path, const std::string& out_path, std::ostream& out) {
  const Scenario sc = io::to_scenario(load_scenario_file(path));
  const io::RunReportFile report = io::make_report_file(sc, run_epr_analysis(sc));
  emit(io::dump(io::to_json(report)), out_path, out);
  return kOk;
}

inline int cmd_sample(const std::string& path, std::uint64_t shots, std::uint64_t seed, const std::string& out_path,
                      std::ostream& out) {
  const Scenario sc = io::to_scenario(load_scenario_file(path));
  ShotRecord record = sample_chain(sc, shots, seed);
  EmpiricalComparison comparison = compare_empirical(record, sc);
  const io::RunReportFile report =
      io::make_report_file(sc, run_epr_analysis(sc), std::move(record), std::move(comparison));
  emit(io::dump(io::to_json(report)), out_path, out);
  return kOk;
}

/// Parses "re,im,re,im,re,im,re,im" into four complex amplitudes.
inline std::vector<Complex> parse_amplitudes(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--amplitudes", "'" + item + "' is not a number");
    }
    if (used != item.size()) throw CLI::ValidationError("--amplitudes", "'" + item + "' is not a number");
    values.push_back(v);
  }
  if (values.size() != 8) throw CLI::ValidationError("--amplitudes", "expected 8 comma-separated numbers");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < 8; i += 2) out.emplace_back(values[i], values[i + 1]);
  return out;
}

inline int cmd_demo_pauli(const std::vector<Complex>& amps, const std::string& out_path, std::ostream& out) {
  const Scenario sc = build_pauli_scenario(amps[0], amps[1], amps[2], amps[3], "pauli-demo");
  const io::RunReportFile report = io::make_report_file(sc, run_epr_analysis(sc));
  emit(io::dump(io::to_json(report)), out_path, out);
  return kOk;
}

}  // namespace detail

/// Runs the CLI on `args` (without the program name). Returns the exit code.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-level EPR analysis: conditional predictions given a conserved sum", "epr"};
  app.require_subcommand(1);

  std::string path;
  std::string out_path;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::string amplitudes;

  auto* verify = app.add_subcommand("verify", "Check scenario invariants and print a residual table");
  verify->add_option("file", path, "Scenario JSON file")->required();

  auto* analyze = app.add_subcommand("analyze", "Run the EPR analysis and emit a JSON report");
  analyze->add_option("file", path, "Scenario JSON file")->required();
  analyze->add_option("--out", out_path, "Output file (default: stdout)");

  auto* sample = app.add_subcommand("sample", "Sample the S-then-A1 measurement chain");
  sample->add_option("file", path, "Scenario JSON file")->required();
  sample->add_option("--shots", shots, "Number of shots")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "64-bit seed");
  sample->add_option("--out", out_path, "Output file (default: stdout)");

  auto* demo = app.add_subcommand("demo-pauli", "Analyze the two-qubit Pauli example with inline amplitudes");
  demo->add_option("--amplitudes", amplitudes, "re,im for (1,1), (1,-1), (-1,1), (-1,-1)")->required();
  demo->add_option("--out", out_path, "Output file (default: stdout)");

  std::vector<Complex> amps;
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (demo->parsed()) amps = detail::parse_amplitudes(amplitudes);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (verify->parsed()) return detail::cmd_verify(path, out, err);
    if (analyze->parsed()) return detail::cmd_analyze(path, out_path, out);
    if (sample->parsed()) return detail::cmd_sample(path, shots, seed, out_path, out);
    return detail::cmd_demo_pauli(amps, out_path, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const ImpossibleOutcome& e) {
    err << "impossible outcome: " << e.what() << "\n";
    return kImpossible;
  } catch (const std::ios_base::failure& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    // Remaining domain errors come from inputs that passed parsing but are
    // unusable (e.g. a zero amplitude vector given inline).
    err << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  }
}

}  // namespace epr::cli
