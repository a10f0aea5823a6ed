// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "epr/cli.hpp"
#include "epr/epr.hpp"
#include "epr/io.hpp"
#include "support/generators.hpp"

namespace {

using namespace epr;
using testing::random_hermitian;
using testing::random_nondegenerate_hermitian;
using testing::random_table;
using testing::random_vector;
using testing::Rng;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Scenario psi0_scenario() { return build_pauli_scenario(0.0, std::sqrt(0.8), std::sqrt(0.2), 0.0); }

Verdict criterion1() {
  Verdict o;
  Rng rng(1001);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + trial % 5;
    const Theorem1Report r =
        verify_theorem1(Observable(random_hermitian(rng, n)), Observable(random_hermitian(rng, n)), 1.0);
    const double limit = 1e-10 * r.c_norm;
    o.require(r.trace_residual <= limit, "trace residual above 1e-10 ||C|| on trial " + std::to_string(trial));
    o.require(r.max_diag_residual <= limit, "diagonal residual above 1e-10 ||C|| on trial " + std::to_string(trial));
    worst = std::max(worst, std::max(r.trace_residual, r.max_diag_residual) / std::max(r.c_norm, 1e-300));
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 1.0, fmt("runtime %.3f s", elapsed));
  if (o.pass) o.detail = fmt("worst relative residual %.2e", worst) + fmt(", %.3f s", elapsed);
  return o;
}

Verdict criterion2() {
  Verdict o;
  const Scenario sc = psi0_scenario();
  const EprReport r = run_epr_analysis(sc);
  const double tol = 1e-10;
  o.require(std::abs(*r.sum_spectrum.probability_of(0.0, 1e-12) - 1.0) <= tol, "p(S=0) != 1");
  const SumBranchReport* b = r.branch(0.0);
  if (b == nullptr) {
    o.require(false, "no branch for s = 0");
    return o;
  }
  OutcomeDistribution a1{b->a1_distribution.support};
  o.require(std::abs(*a1.probability_of(1.0, 1e-12) - 0.8) <= tol, "P(A1=+1|S=0) != 0.8");
  o.require(std::abs(*a1.probability_of(-1.0, 1e-12) - 0.2) <= tol, "P(A1=-1|S=0) != 0.2");
  o.require(std::abs(b->a1.mean - 0.6) <= tol, "mean(A1) != 0.6");
  o.require(std::abs(b->a1.stdev - 0.8) <= tol, "Delta(A1) != 0.8");
  o.require(std::abs(b->a2.stdev - 0.8) <= tol, "Delta(A2) != 0.8");
  o.require(std::abs(b->b1.mean) <= tol && std::abs(b->b2.mean) <= tol, "<B_i> != 0");
  o.require(std::abs(b->b1.stdev - 1.0) <= tol && std::abs(b->b2.stdev - 1.0) <= tol, "Delta(B_i) != 1");
  o.require(std::abs(b->c1_mean) <= tol && std::abs(b->c2_mean) <= tol, "<C_i> != 0");
  const double product = b->audit1.delta_a * b->audit1.delta_b;
  o.require(std::abs(product - 0.8) <= tol, "audit product != 0.8");
  o.require(std::abs(b->audit1.rhs) <= tol && b->audit1.satisfied, "audit rhs != 0 or unsatisfied");
  if (o.pass) o.detail = "mean(A1)=0.6, Delta(A1)=Delta(A2)=0.8, audit 0.8 >= 0";
  return o;
}

Verdict criterion3() {
  Verdict o;
  const Scenario sc = psi0_scenario();
  const EprSystem& sys = sc.system();
  const PureState phi = sequential_measure(sys, sc.initial_state(), 0.0, 1.0);
  // |1,-1> is the second computational basis vector.
  ComplexVector expected = ComplexVector::Zero(4);
  expected(1) = 1.0;
  const double overlap = fidelity(phi, PureState::composite(expected, 2));
  o.require(overlap >= 1.0 - 1e-10, fmt("overlap %.16f", overlap));
  const CertainPrediction cp =
      certain_prediction(sys, phi, SpectrumFunction::identity(sys.factor().eigenvalues()), 0.0, 1.0);
  o.require(std::abs(cp.value + 1.0) <= 1e-10, "A2 value != -1");
  o.require(cp.stdev <= 1e-10, "Delta(A2) != 0");
  o.require(std::abs(*cp.delta_check.probability_of(-1.0, 1e-12) - 1.0) <= 1e-12 &&
                std::abs(*cp.delta_check.probability_of(1.0, 1e-12)) <= 1e-12,
            "A2 distribution is not a point mass at -1");
  const UncertaintyReport audit = epr_resolution_check(sys, phi, sys.lift_second(sc.obs_b()),
                                                       sys.lift_second(sc.obs_c()), sc.alpha());
  o.require(audit.rhs <= 1e-10 && audit.satisfied, "resolution check rhs above 1e-10");
  if (o.pass) o.detail = fmt("overlap 1 - %.1e", 1.0 - overlap);
  return o;
}

Verdict criterion4() {
  Verdict o;
  Rng rng(1004);
  double worst = 0.0;
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + trial % 3;
    const EprSystem sys{Observable(random_nondegenerate_hermitian(rng, n))};
    const PureState psi = PureState::composite(random_vector(rng, n * n), n);
    for (const auto& out : outcome_probabilities(psi, sys.sum()).outcomes) {
      if (out.probability < kZeroProbability) continue;
      const Theorem2Report r = verify_theorem2(sys, psi, out.value);
      o.require(r.mean_identity_residual <= 1e-10, "mean identity residual on trial " + std::to_string(trial));
      o.require(r.stdev_gap <= 1e-10, "stdev gap on trial " + std::to_string(trial));
      worst = std::max({worst, r.mean_identity_residual, r.stdev_gap});
      ++checked;
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " sums, worst residual " + fmt("%.2e", worst);
  return o;
}

Verdict criterion5() {
  Verdict o;
  Rng rng(1005);
  double worst_tower = 0.0, worst_oracle = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + trial % 3;
    const EprSystem sys{Observable(random_nondegenerate_hermitian(rng, n))};
    const PureState psi = PureState::composite(random_vector(rng, n * n), n);
    const SpectrumFunction f = random_table(rng, sys.factor().eigenvalues());
    const std::vector<double> s_spec = sys.sum().eigenvalues();
    SpectrumFunction g;
    switch (trial % 3) {
      case 0: {
        const double target = s_spec[static_cast<std::size_t>(trial) % s_spec.size()];
        g = SpectrumFunction::tabulate(s_spec, [&](double s) { return s == target ? 1.0 : 0.0; });
        break;
      }
      case 1:
        g = SpectrumFunction::tabulate(s_spec, [](double s) { return 0.5 - s + 0.25 * s * s; });
        break;
      default:
        g = random_table(rng, s_spec);
    }
    const double tower = verify_tower_property(sys, psi, f, g);
    o.require(tower <= 1e-10, "tower residual on trial " + std::to_string(trial));
    worst_tower = std::max(worst_tower, tower);

    const ConditionalExpectationTable q = quantum_conditional_expectation(sys, psi, f);
    const ConditionalExpectationTable c = oracle_conditional(psi, sys.factor(), f);
    if (q.entries.size() != c.entries.size()) {
      o.require(false, "oracle table size differs on trial " + std::to_string(trial));
      continue;
    }
    for (std::size_t k = 0; k < q.entries.size(); ++k) {
      const double d = std::max(std::abs(q.entries[k].value - c.entries[k].value),
                                std::abs(q.entries[k].sum - c.entries[k].sum));
      o.require(d <= 1e-10, "oracle mismatch on trial " + std::to_string(trial));
      worst_oracle = std::max(worst_oracle, d);
    }
  }
  if (o.pass) o.detail = fmt("tower %.2e", worst_tower) + fmt(", oracle %.2e", worst_oracle);
  return o;
}

Verdict criterion6() {
  Verdict o;
  Rng rng(1006);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + trial % 3;
    const EprSystem sys{Observable(random_nondegenerate_hermitian(rng, n))};
    const PureState psi = PureState::composite(random_vector(rng, n * n), n);
    ComplexVector rebuilt = ComplexVector::Zero(n * n);
    for (const SumBranch& b : decompose_by_sum(psi, sys.sum())) {
      rebuilt += std::sqrt(b.probability) * b.state.amplitudes();
      const double eig =
          (sys.sum().matrix() * b.state.amplitudes() - b.eigenvalue * b.state.amplitudes()).norm();
      o.require(eig <= 1e-10, "branch is not an S eigenstate on trial " + std::to_string(trial));
    }
    const double residual = (rebuilt - psi.amplitudes()).norm();
    o.require(residual <= 1e-10, "reconstruction residual on trial " + std::to_string(trial));
    worst = std::max(worst, residual);
  }
  if (o.pass) o.detail = fmt("worst reconstruction residual %.2e", worst);
  return o;
}

Verdict criterion7() {
  Verdict o;
  const Scenario sc = build_pauli_scenario(0.5, 0.5, 0.5, 0.5);
  const auto t0 = Clock::now();
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    within += compare_empirical(sample_chain(sc, 10000, seed), sc).within_3sigma ? 1 : 0;
  const bool identical = sample_chain(sc, 10000, 7) == sample_chain(sc, 10000, 7);
  const double elapsed = seconds_since(t0);
  o.require(within >= 97, std::to_string(within) + "/100 seeds within 3 sigma");
  o.require(identical, "same seed produced different records");
  o.require(elapsed < 10.0, fmt("runtime %.2f s", elapsed));
  if (o.pass) o.detail = std::to_string(within) + "/100 seeds within 3 sigma" + fmt(", %.2f s", elapsed);
  return o;
}

Verdict criterion8() {
  Verdict o;
  const std::string root = EPR_SOURCE_DIR;
  auto run = [](std::vector<std::string> args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    if (out_text) *out_text = out.str();
    return code;
  };
  auto round_trips = [](const std::string& text) {
    const io::RunReportFile parsed = io::parse_report_text(text);
    return io::dump(io::to_json(parsed)) == text;
  };
  for (const char* name : {"pauli_epr.json", "pauli_uniform.json", "qutrit_sum.json"}) {
    const std::string file = root + "/scenarios/" + name;
    o.require(run({"verify", file}) == cli::kOk, std::string("verify ") + name);
    std::string analyzed, sampled, sampled_again;
    o.require(run({"analyze", file}, &analyzed) == cli::kOk, std::string("analyze ") + name);
    o.require(round_trips(analyzed), std::string("analyze round-trip ") + name);
    o.require(run({"sample", file, "--shots", "2000", "--seed", "42"}, &sampled) == cli::kOk,
              std::string("sample ") + name);
    o.require(round_trips(sampled), std::string("sample round-trip ") + name);
    run({"sample", file, "--shots", "2000", "--seed", "42"}, &sampled_again);
    o.require(sampled == sampled_again, std::string("sample not byte-identical ") + name);
  }
  const std::vector<std::pair<std::string, int>> fixtures = {
      {"malformed.json", cli::kParse},          {"unknown_field.json", cli::kParse},
      {"bad_shape.json", cli::kParse},          {"non_hermitian_a.json", cli::kInvariant},
      {"com1_inconsistent.json", cli::kInvariant}, {"zero_state.json", cli::kInvariant},
      {"degenerate_a.json", cli::kInvariant},   {"does_not_exist.json", cli::kIo},
  };
  for (const auto& [name, code] : fixtures)
    o.require(run({"verify", root + "/tests/fixtures/" + name}) == code, "fixture " + name);
  o.require(run({"sample", root + "/scenarios/pauli_uniform.json", "--shots", "0"}) == cli::kUsage, "--shots 0");
  if (o.pass) o.detail = "3 scenarios round-trip, 8 fixtures, usage error";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"1 theorem1 suite", criterion1},          {"2 pauli example", criterion2},
      {"3 sequential chain", criterion3},        {"4 theorem2 suite", criterion4},
      {"5 tower property and oracle", criterion5}, {"6 decomposition", criterion6},
      {"7 monte-carlo consistency", criterion7}, {"8 cli contract", criterion8},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
