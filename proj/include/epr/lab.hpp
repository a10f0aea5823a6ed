// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scenarios, the end-to-end EPR analysis, and a seeded shot sampler for the
// chain "measure S, then A1".

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epr/composite.hpp"
#include "epr/conditional.hpp"
#include "epr/error.hpp"
#include "epr/linalg.hpp"
#include "epr/observable.hpp"
#include "epr/rng.hpp"
#include "epr/state.hpp"

namespace epr {

/// Tolerance for [A,B]/(i alpha) matching a supplied C.
inline constexpr double kCom1Tolerance = 1e-8;

/// A factor-level triple (A, B, C) with [A,B] = i alpha C and an initial
/// state on the two-factor space.
class Scenario {
 public:
  Scenario(std::string label, EprSystem system, Observable b, Observable c, double alpha, PureState state)
      : label_(std::move(label)),
        system_(std::move(system)),
        obs_b_(std::move(b)),
        obs_c_(std::move(c)),
        alpha_(alpha),
        state_(std::move(state)) {}

  const std::string& label() const noexcept { return label_; }
  Index factor_dim() const noexcept { return system_.factor_dim(); }
  const Observable& obs_a() const noexcept { return system_.factor(); }
  const Observable& obs_b() const noexcept { return obs_b_; }
  const Observable& obs_c() const noexcept { return obs_c_; }
  double alpha() const noexcept { return alpha_; }
  const PureState& initial_state() const noexcept { return state_; }
  const EprSystem& system() const noexcept { return system_; }

 private:
  std::string label_;
  EprSystem system_;
  Observable obs_b_;
  Observable obs_c_;
  double alpha_;
  PureState state_;
};

/// Validates the inputs and builds a scenario. When `c` is absent it is
/// derived as [A,B]/(i alpha). Every failure names the offending field.
inline Scenario make_scenario(std::string label, const ComplexMatrix& a, const ComplexMatrix& b,
                              const std::optional<ComplexMatrix>& c, double alpha, const ComplexVector& state) {
  const Index n = a.rows();
  auto check_matrix = [n](const ComplexMatrix& m, const char* field) {
    if (m.rows() != n || m.cols() != n || n == 0) throw InvariantViolation(field, "must be a square factor_dim matrix");
    if (!all_finite(m)) throw InvariantViolation(field, "has non-finite entries");
    if (!is_hermitian(m)) throw InvariantViolation(field, "is not Hermitian");
  };
  check_matrix(a, "matrix_a");
  check_matrix(b, "matrix_b");
  if (c) check_matrix(*c, "matrix_c");
  if (alpha == 0.0 || !std::isfinite(alpha)) throw InvariantViolation("alpha", "must be finite and nonzero");
  if (state.size() != n * n) throw InvariantViolation("state", "must have factor_dim^2 amplitudes");
  if (!all_finite(state)) throw InvariantViolation("state", "has non-finite amplitudes");
  if (state.norm() < kMinStateNorm) throw InvariantViolation("state", "norm is below 1e-8");

  Observable obs_a(a);
  if (!obs_a.nondegenerate()) throw InvariantViolation("matrix_a", "has a degenerate spectrum");

  const ComplexMatrix derived = extract_c(a, b, alpha);
  if (c && max_abs(derived - *c) > kCom1Tolerance)
    throw InvariantViolation("matrix_c", "com1 consistency failed: C differs from [A,B]/(i alpha)");

  return Scenario(std::move(label), EprSystem(std::move(obs_a)), Observable(b), Observable(c ? *c : derived), alpha,
                  PureState::composite(state, n));
}

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

/// Two qubits with A = sigma_z, B = sigma_x, C = sigma_y, alpha = 2. The
/// amplitudes are in the basis order (1,1), (1,-1), (-1,1), (-1,-1).
inline Scenario build_pauli_scenario(Complex a11, Complex a1m1, Complex am11, Complex am1m1,
                                     std::string label = "pauli") {
  ComplexVector psi(4);
  psi << a11, a1m1, am11, am1m1;
  if (!all_finite(psi)) throw InvalidArgument("amplitudes must be finite");
  if (psi.norm() < kMinStateNorm) throw InvalidArgument("amplitude vector norm is below 1e-8");
  return make_scenario(std::move(label), pauli_z(), pauli_x(), pauli_y(), 2.0, psi);
}

// ---------------------------------------------------------------------------
// Analysis report

struct SumBranchReport {
  double sum = 0.0;
  double probability = 0.0;
  ConditionalDistribution a1_distribution;
  PredictionSummary a1;
  PredictionSummary a2;
  PredictionSummary b1;
  PredictionSummary b2;
  double c1_mean = 0.0;
  double c2_mean = 0.0;
  double theorem2_mean_residual = 0.0;
  double theorem2_stdev_gap = 0.0;
  UncertaintyReport audit1;
  UncertaintyReport audit2;
  Index schmidt_rank = 0;

  bool operator==(const SumBranchReport&) const = default;
};

struct ChainReport {
  double sum = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  /// P(A1 = a1 | S = s).
  double conditional_probability = 0.0;
  /// |<a1, a2|phi>|, 1 for the expected product eigenstate.
  double basis_overlap = 0.0;
  /// Global phase of phi relative to |a1, a2>.
  double phase_re = 0.0;
  double phase_im = 0.0;
  double a2_value = 0.0;
  double a2_stdev = 0.0;
  UncertaintyReport audit;

  bool operator==(const ChainReport&) const = default;
};

struct EprReport {
  OutcomeDistribution sum_spectrum;
  std::vector<SumBranchReport> per_sum;
  std::vector<ChainReport> chains;

  bool all_audits_satisfied() const {
    for (const auto& b : per_sum)
      if (!b.audit1.satisfied || !b.audit2.satisfied) return false;
    for (const auto& c : chains)
      if (!c.audit.satisfied) return false;
    return true;
  }

  const SumBranchReport* branch(double s, double tol = 1e-9) const {
    for (const auto& b : per_sum)
      if (std::abs(b.sum - s) <= tol) return &b;
    return nullptr;
  }

  const ChainReport* chain(double s, double a1, double tol = 1e-9) const {
    for (const auto& c : chains)
      if (std::abs(c.sum - s) <= tol && std::abs(c.a1 - a1) <= tol) return &c;
    return nullptr;
  }

  bool operator==(const EprReport&) const = default;
};

inline EprReport run_epr_analysis(const Scenario& sc) {
  const EprSystem& sys = sc.system();
  const PureState& psi = sc.initial_state();
  const Observable b1 = sys.lift_first(sc.obs_b());
  const Observable b2 = sys.lift_second(sc.obs_b());
  const Observable c1 = sys.lift_first(sc.obs_c());
  const Observable c2 = sys.lift_second(sc.obs_c());
  const std::vector<double> spec = sys.factor().eigenvalues();
  const SpectrumFunction identity = SpectrumFunction::identity(spec);

  EprReport report;
  report.sum_spectrum = outcome_probabilities(psi, sys.sum());

  for (const SumBranch& branch : decompose_by_sum(psi, sys.sum())) {
    const double s = branch.eigenvalue;
    const PureState& psi_s = branch.state;
    const std::size_t k = sys.sum_line(s);

    SumBranchReport r;
    r.sum = s;
    r.probability = branch.probability;
    r.a1_distribution = conditional_distribution(sys, psi, s);
    r.a1 = conditional_prediction(sys, psi, identity, s);
    const Theorem2Report t2 = verify_theorem2(sys, psi, s);
    r.a2 = t2.a2;
    r.theorem2_mean_residual = t2.mean_identity_residual;
    r.theorem2_stdev_gap = t2.stdev_gap;
    r.b1 = {mean_value(psi_s, b1), prediction_error(psi_s, b1)};
    r.b2 = {mean_value(psi_s, b2), prediction_error(psi_s, b2)};
    r.c1_mean = psi_s.expectation(c1.matrix()).real();
    r.c2_mean = psi_s.expectation(c2.matrix()).real();
    r.audit1 = audit_uncertainty(psi_s, sys.a1(), b1, c1, sc.alpha());
    r.audit2 = audit_uncertainty(psi_s, sys.a2(), b2, c2, sc.alpha());
    r.schmidt_rank = schmidt_rank(psi_s, sys.space());

    for (const Outcome& o : r.a1_distribution.support) {
      if (o.probability < kZeroProbability) continue;
      const std::size_t n = sys.factor_line(o.value);
      const Index m = *sys.index().partner(static_cast<Index>(n), k);
      const PureState phi = sequential_measure(sys, psi, s, o.value);
      const CertainPrediction cp = certain_prediction(sys, phi, identity, s, o.value);
      const Complex amp = sys.basis_state(static_cast<Index>(n), m).amplitudes().dot(phi.amplitudes());

      ChainReport c;
      c.sum = s;
      c.a1 = o.value;
      c.a2 = spec[static_cast<std::size_t>(m)];
      c.conditional_probability = o.probability;
      c.basis_overlap = std::abs(amp);
      const Complex phase = std::abs(amp) > 0.0 ? amp / std::abs(amp) : Complex{1.0, 0.0};
      c.phase_re = phase.real();
      c.phase_im = phase.imag();
      c.a2_value = cp.value;
      c.a2_stdev = cp.stdev;
      c.audit = epr_resolution_check(sys, phi, b2, c2, sc.alpha());
      report.chains.push_back(c);
    }
    report.per_sum.push_back(std::move(r));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Shot sampling

/// Decimal form with 12 significant digits; magnitudes below 1e-12 print as 0.
inline std::string format_outcome(double x) {
  if (std::abs(x) < 1e-12) x = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string path_key(double s, double a1, double a2) {
  return "s=" + format_outcome(s) + ",a1=" + format_outcome(a1) + ",a2=" + format_outcome(a2);
}

struct ChainPath {
  double sum = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  /// p(s) * P(A1 = a1 | S = s)
  double probability = 0.0;
  std::string key;
};

/// Every (s, a1, a2) the chain can produce, with its analytic probability.
inline std::vector<ChainPath> chain_paths(const Scenario& sc) {
  const EprSystem& sys = sc.system();
  const std::vector<double> spec = sys.factor().eigenvalues();
  std::vector<ChainPath> paths;
  for (const SumBranch& branch : decompose_by_sum(sc.initial_state(), sys.sum())) {
    const std::size_t k = sys.sum_line(branch.eigenvalue);
    const OutcomeDistribution a1 = outcome_probabilities(branch.state, sys.a1());
    for (std::size_t n = 0; n < a1.outcomes.size(); ++n) {
      const auto m = sys.index().partner(static_cast<Index>(n), k);
      if (!m || a1.outcomes[n].probability < kZeroProbability) continue;
      ChainPath p;
      p.sum = branch.eigenvalue;
      p.a1 = spec[n];
      p.a2 = spec[static_cast<std::size_t>(*m)];
      p.probability = branch.probability * a1.outcomes[n].probability;
      p.key = path_key(p.sum, p.a1, p.a2);
      paths.push_back(std::move(p));
    }
  }
  return paths;
}

struct ShotRecord {
  std::uint64_t seed = 0;
  std::uint64_t shots = 0;
  std::map<std::string, std::uint64_t> counts;
  std::map<std::string, double> empirical;

  bool operator==(const ShotRecord&) const = default;
};

namespace detail {

inline std::size_t draw(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace detail

/// Simulates `shots` repetitions of: measure S, collapse, measure A1,
/// collapse. Shot i draws from the substream (seed, i), so the record is a
/// pure function of (scenario, shots, seed).
inline ShotRecord sample_chain(const Scenario& sc, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw InvalidArgument("shots must be at least 1");
  const EprSystem& sys = sc.system();
  const std::vector<double> spec = sys.factor().eigenvalues();

  struct Branch {
    double sum;
    std::size_t line;
    std::vector<std::size_t> a1_index;
    std::vector<double> a1_cumulative;
    std::vector<std::string> keys;
  };
  std::vector<Branch> branches;
  std::vector<double> sum_cumulative;
  double acc = 0.0;
  for (const SumBranch& b : decompose_by_sum(sc.initial_state(), sys.sum())) {
    Branch br{b.eigenvalue, sys.sum_line(b.eigenvalue), {}, {}, {}};
    const OutcomeDistribution a1 = outcome_probabilities(b.state, sys.a1());
    double inner = 0.0;
    for (std::size_t n = 0; n < a1.outcomes.size(); ++n) {
      const auto m = sys.index().partner(static_cast<Index>(n), br.line);
      if (!m || a1.outcomes[n].probability < kZeroProbability) continue;
      inner += a1.outcomes[n].probability;
      br.a1_index.push_back(n);
      br.a1_cumulative.push_back(inner);
      br.keys.push_back(path_key(b.eigenvalue, spec[n], spec[static_cast<std::size_t>(*m)]));
    }
    acc += b.probability;
    sum_cumulative.push_back(acc);
    branches.push_back(std::move(br));
  }

  std::vector<std::vector<std::uint64_t>> tallies(branches.size());
  for (std::size_t i = 0; i < branches.size(); ++i) tallies[i].assign(branches[i].keys.size(), 0);

  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    SubstreamRng rng(seed, shot);
    const std::size_t b = detail::draw(sum_cumulative, rng.uniform());
    const std::size_t a = detail::draw(branches[b].a1_cumulative, rng.uniform());
    ++tallies[b][a];
  }

  ShotRecord record;
  record.seed = seed;
  record.shots = shots;
  for (std::size_t b = 0; b < branches.size(); ++b) {
    for (std::size_t a = 0; a < branches[b].keys.size(); ++a) {
      if (tallies[b][a] == 0) continue;
      record.counts[branches[b].keys[a]] = tallies[b][a];
      record.empirical[branches[b].keys[a]] = static_cast<double>(tallies[b][a]) / static_cast<double>(shots);
    }
  }
  return record;
}

struct FrequencyCheck {
  std::string key;
  double analytic = 0.0;
  double empirical = 0.0;
  double deviation = 0.0;
  /// 3 sqrt(p (1 - p) / shots)
  double bound = 0.0;
  bool within = true;

  bool operator==(const FrequencyCheck&) const = default;
};

struct EmpiricalComparison {
  double max_abs_deviation = 0.0;
  bool within_3sigma = true;
  std::vector<FrequencyCheck> paths;
  /// Marginal of the first measurement (S).
  std::vector<FrequencyCheck> sums;

  bool operator==(const EmpiricalComparison&) const = default;
};

inline EmpiricalComparison compare_empirical(const ShotRecord& record, const Scenario& sc) {
  if (record.shots == 0) throw InvalidArgument("record has no shots");
  std::uint64_t total = 0;
  for (const auto& [key, count] : record.counts) total += count;
  if (total != record.shots) throw InvalidArgument("record counts do not sum to its shot count");

  const std::vector<ChainPath> paths = chain_paths(sc);
  for (const auto& [key, count] : record.counts) {
    const bool known = std::any_of(paths.begin(), paths.end(), [&](const ChainPath& p) { return p.key == key; });
    if (!known) throw InvalidArgument("record path '" + key + "' cannot occur in this scenario");
  }

  const double shots = static_cast<double>(record.shots);
  EmpiricalComparison out;
  auto check = [&](std::string key, double analytic, double empirical) {
    FrequencyCheck c;
    c.key = std::move(key);
    c.analytic = analytic;
    c.empirical = empirical;
    c.deviation = std::abs(empirical - analytic);
    c.bound = 3.0 * std::sqrt(std::max(0.0, analytic * (1.0 - analytic)) / shots);
    c.within = c.deviation <= c.bound + 1e-12;
    out.max_abs_deviation = std::max(out.max_abs_deviation, c.deviation);
    out.within_3sigma = out.within_3sigma && c.within;
    return c;
  };

  std::map<std::string, std::pair<double, double>> marginal;  // key -> (analytic, empirical)
  for (const ChainPath& p : paths) {
    const auto it = record.counts.find(p.key);
    const double emp = it == record.counts.end() ? 0.0 : static_cast<double>(it->second) / shots;
    out.paths.push_back(check(p.key, p.probability, emp));
    auto& slot = marginal["s=" + format_outcome(p.sum)];
    slot.first += p.probability;
    slot.second += emp;
  }
  for (const auto& [key, pe] : marginal) out.sums.push_back(check(key, pe.first, pe.second));
  return out;
}

}  // namespace epr
