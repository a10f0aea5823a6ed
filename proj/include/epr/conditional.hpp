// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Predictions conditioned on an observed value of S, the sequential chain
// S then A1, and the conditional expectation of f(A1) given S.
//
// Every quantity here is computed through projectors and post-measurement
// states. `oracle_conditional` is the one exception: it conditions the
// joint distribution classically and shares no code path with the rest.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "epr/composite.hpp"
#include "epr/error.hpp"
#include "epr/linalg.hpp"
#include "epr/observable.hpp"
#include "epr/state.hpp"

namespace epr {

struct ConditionalDistribution {
  double given_sum = 0.0;
  /// (a_n, P(A1 = a_n | S = s)) for every a_n with chi(a_n, s).
  std::vector<Outcome> support;

  double total() const {
    double t = 0.0;
    for (const auto& o : support) t += o.probability;
    return t;
  }

  bool operator==(const ConditionalDistribution&) const = default;
};

struct PredictionSummary {
  double mean = 0.0;
  double stdev = 0.0;

  bool operator==(const PredictionSummary&) const = default;
};

struct ConditionalExpectationEntry {
  double sum = 0.0;
  double probability = 0.0;
  double value = 0.0;

  bool operator==(const ConditionalExpectationEntry&) const = default;
};

/// e(s_k) on the populated part of S's spectrum.
struct ConditionalExpectationTable {
  std::vector<ConditionalExpectationEntry> entries;

  std::optional<double> at(double s, double tol) const {
    for (const auto& e : entries)
      if (std::abs(e.sum - s) <= tol) return e.value;
    return std::nullopt;
  }
};

/// H(a_n, s_k) tabulated over the pairs with chi(a_n, s_k).
class TwoArgFunction {
 public:
  struct Entry {
    double a = 0.0;
    double s = 0.0;
    double value = 0.0;
  };

  TwoArgFunction() = default;
  explicit TwoArgFunction(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  template <typename F>
  static TwoArgFunction tabulate(const EprSystem& sys, F&& fn) {
    const std::vector<double> spec = sys.factor().eigenvalues();
    const AntiDiagonalIndex& idx = sys.index();
    std::vector<Entry> entries;
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (const auto& p : idx.sets[k])
        entries.push_back({spec[static_cast<std::size_t>(p.n)], idx.sums[k],
                           static_cast<double>(fn(spec[static_cast<std::size_t>(p.n)], idx.sums[k]))});
    return TwoArgFunction(std::move(entries));
  }

  double at(double a, double s, double tol) const {
    for (const auto& e : entries_)
      if (std::abs(e.a - a) <= tol && std::abs(e.s - s) <= tol) return e.value;
    throw InvalidArgument("two-argument table has no entry for the requested pair");
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }

 private:
  std::vector<Entry> entries_;
};

namespace detail {

/// psi_s = Pi_k psi / sqrt(p(s_k)) for the line matching s_value.
inline Collapse condition_on_sum(const EprSystem& sys, const PureState& state, double s_value) {
  sys.require_composite(state);
  const std::size_t k = sys.sum_line(s_value);
  return post_measurement_state(state, eigenspace_projector(sys.sum(), k));
}

inline PredictionSummary summarize(const std::vector<Outcome>& dist, const SpectrumFunction& f, double tol) {
  double mean = 0.0;
  for (const auto& o : dist) mean += o.probability * f.at(o.value, tol);
  double var = 0.0;
  for (const auto& o : dist) {
    const double d = f.at(o.value, tol) - mean;
    var += o.probability * d * d;
  }
  return {mean, std::sqrt(std::max(0.0, var))};
}

}  // namespace detail

/// Distribution of A1 in the post-measurement state psi_s, restricted to the
/// a_n compatible with s.
inline ConditionalDistribution conditional_distribution(const EprSystem& sys, const PureState& state,
                                                        double s_value) {
  const std::size_t k = sys.sum_line(s_value);
  const Collapse given = detail::condition_on_sum(sys, state, s_value);
  const OutcomeDistribution a1 = outcome_probabilities(given.state, sys.a1());

  ConditionalDistribution out;
  out.given_sum = sys.index().sums[k];
  for (std::size_t n = 0; n < a1.outcomes.size(); ++n)
    if (sys.index().chi(static_cast<Index>(n), k)) out.support.push_back(a1.outcomes[n]);
  return out;
}

/// Mean and standard deviation of f(A1) given S = s.
inline PredictionSummary conditional_prediction(const EprSystem& sys, const PureState& state,
                                                const SpectrumFunction& f, double s_value) {
  const ConditionalDistribution dist = conditional_distribution(sys, state, s_value);
  return detail::summarize(dist.support, f, sys.factor().grouping_tolerance());
}

/// The same mean evaluated as <psi_s|f(A1)|psi_s>.
inline double conditional_prediction_quadratic_form(const EprSystem& sys, const PureState& state,
                                                    const SpectrumFunction& f, double s_value) {
  const Collapse given = detail::condition_on_sum(sys, state, s_value);
  return best_predictor_quadratic_form(given.state, sys.a1(), f);
}

struct Theorem2Report {
  PredictionSummary a1;
  PredictionSummary a2;
  /// |m(A2) - (s - m(A1))|
  double mean_identity_residual = 0.0;
  /// |Delta(A1) - Delta(A2)|
  double stdev_gap = 0.0;

  bool operator==(const Theorem2Report&) const = default;
};

/// In psi_s: m(A2) = s - m(A1) and Delta(A1) = Delta(A2). A1 and A2 are
/// evaluated independently as observables on psi_s.
inline Theorem2Report verify_theorem2(const EprSystem& sys, const PureState& state, double s_value) {
  const double s = sys.index().sums[sys.sum_line(s_value)];
  const Collapse given = detail::condition_on_sum(sys, state, s_value);
  Theorem2Report r;
  r.a1 = {mean_value(given.state, sys.a1()), prediction_error(given.state, sys.a1())};
  r.a2 = {mean_value(given.state, sys.a2()), prediction_error(given.state, sys.a2())};
  r.mean_identity_residual = std::abs(r.a2.mean - (s - r.a1.mean));
  r.stdev_gap = std::abs(r.a1.stdev - r.a2.stdev);
  return r;
}

/// Measure S (observing s) and then A1 (observing a1). Returns the final
/// post-measurement state, a product eigenstate |a1, s - a1> up to phase.
inline PureState sequential_measure(const EprSystem& sys, const PureState& state, double s_value, double a1_value) {
  const Collapse given_sum = detail::condition_on_sum(sys, state, s_value);
  const std::size_t n = sys.factor_line(a1_value);
  const Collapse given_a1 = post_measurement_state(given_sum.state, sys.a1().line(n).projector);
  return given_a1.state;
}

struct CertainPrediction {
  double value = 0.0;
  double stdev = 0.0;
  /// Distribution of A2 in phi: a point mass at s - a1.
  OutcomeDistribution delta_check;
};

/// Prediction of g(A2) in the state left by `sequential_measure`.
inline CertainPrediction certain_prediction(const EprSystem& sys, const PureState& phi, const SpectrumFunction& g,
                                            double s_value, double a1_value) {
  sys.require_composite(phi);
  const std::size_t k = sys.sum_line(s_value);
  const std::size_t n = sys.factor_line(a1_value);
  if (!sys.index().chi(static_cast<Index>(n), k))
    throw ImpossibleOutcome("a1 is incompatible with the observed sum");

  const ComplexMatrix g2 = operator_function(sys.a2(), g);
  CertainPrediction out;
  out.value = phi.expectation(g2).real();
  out.stdev = (g2 * phi.amplitudes() - out.value * phi.amplitudes()).norm();
  out.delta_check = outcome_probabilities(phi, sys.a2());
  return out;
}

/// Uncertainty audit of (A2, B2, C2) in a product eigenstate phi. The
/// right-hand side is the diagonal element of C in A's eigenbasis at s - a1.
inline UncertaintyReport epr_resolution_check(const EprSystem& sys, const PureState& phi, const Observable& b2,
                                              const Observable& c2, double alpha = 1.0) {
  sys.require_composite(phi);
  return audit_uncertainty(phi, sys.a2(), b2, c2, alpha);
}

/// e(s_k) = <psi|Pi_k f(A1) Pi_k|psi> / p(s_k) for populated s_k.
inline ConditionalExpectationTable quantum_conditional_expectation(const EprSystem& sys, const PureState& state,
                                                                   const SpectrumFunction& f) {
  sys.require_composite(state);
  const ComplexMatrix f1 = operator_function(sys.a1(), f);
  ConditionalExpectationTable table;
  for (const auto& l : sys.sum().lines()) {
    const ComplexVector projected = l.projector * state.amplitudes();
    const double p = projected.squaredNorm();
    if (p < kZeroProbability) continue;
    table.entries.push_back({l.eigenvalue, p, projected.dot(f1 * projected).real() / p});
  }
  return table;
}

/// |sum_k G(s_k) e(s_k) p(s_k) - sum_{n,m} f(a_n) G(a_n + a_m) q(n, m)|.
inline double verify_tower_property(const EprSystem& sys, const PureState& state, const SpectrumFunction& f,
                                    const SpectrumFunction& g) {
  const ConditionalExpectationTable e = quantum_conditional_expectation(sys, state, f);
  const double s_tol = sys.sum().grouping_tolerance();
  const double a_tol = sys.factor().grouping_tolerance();

  double lhs = 0.0;
  for (const auto& entry : e.entries) lhs += g.at(entry.sum, s_tol) * entry.value * entry.probability;

  const JointDistribution q = joint_distribution(state, sys.factor(), sys.space());
  const std::vector<double> spec = sys.factor().eigenvalues();
  double rhs = 0.0;
  for (std::size_t n = 0; n < spec.size(); ++n)
    for (std::size_t m = 0; m < spec.size(); ++m)
      rhs += f.at(spec[n], a_tol) * g.at(spec[n] + spec[m], s_tol) *
             q.q(static_cast<Index>(n), static_cast<Index>(m));
  return std::abs(lhs - rhs);
}

struct Ce2Check {
  double predicted = 0.0;
  double expected = 0.0;
  double residual = 0.0;
};

/// Predicts H(A1, S) in the state left by measuring S = s and A1 = a1 and
/// compares with H(a1, s).
inline Ce2Check verify_ce2(const EprSystem& sys, const PureState& state, const TwoArgFunction& h, double s_value,
                           double a1_value) {
  const PureState phi = sequential_measure(sys, state, s_value, a1_value);
  const AntiDiagonalIndex& idx = sys.index();
  const std::vector<double> spec = sys.factor().eigenvalues();
  const double tol = std::max(sys.factor().grouping_tolerance(), sys.sum().grouping_tolerance());

  // H(A1, S) = sum over compatible (n, k) of H(a_n, s_k) (P_n (x) I) Pi_k.
  ComplexMatrix h_op = ComplexMatrix::Zero(phi.dim(), phi.dim());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    for (const auto& p : idx.sets[k]) {
      const std::size_t n = static_cast<std::size_t>(p.n);
      h_op += h.at(spec[n], idx.sums[k], tol) * (sys.a1().line(n).projector * sys.sum().line(k).projector);
    }
  }
  Ce2Check out;
  out.predicted = phi.expectation(h_op).real();
  out.expected = h.at(spec[sys.factor_line(a1_value)], idx.sums[sys.sum_line(s_value)], tol);
  out.residual = std::abs(out.predicted - out.expected);
  return out;
}

/// Classical reference: reads q(n, m) off the product coefficients, groups
/// all N^2 pairs by a_n + a_m, and conditions by enumeration. Uses neither
/// S, its projectors, nor the anti-diagonal index.
inline ConditionalExpectationTable oracle_conditional(const PureState& state, const Observable& a,
                                                      const SpectrumFunction& f) {
  if (!a.nondegenerate()) throw InvalidArgument("oracle_conditional requires a nondegenerate factor observable");
  const Index n = a.dim();
  if (state.dim() != n * n) throw DimensionMismatch("state is not on the product of two factors of A's dimension");

  const ComplexMatrix v = a.eigenbasis();
  const std::vector<double> spec = a.eigenvalues();
  struct Cell {
    double sum;
    double q;
    double fa;
  };
  std::vector<Cell> cells;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Complex c{0.0, 0.0};
      for (Index x = 0; x < n; ++x)
        for (Index y = 0; y < n; ++y) c += std::conj(v(x, i)) * std::conj(v(y, j)) * state.amplitudes()(x * n + y);
      cells.push_back({spec[static_cast<std::size_t>(i)] + spec[static_cast<std::size_t>(j)], std::norm(c),
                       f.at(spec[static_cast<std::size_t>(i)], a.grouping_tolerance())});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.sum < y.sum; });

  double radius = 0.0;
  for (double x : spec) radius = std::max(radius, std::abs(x));
  const double tol = 1e-9 * std::max(1.0, 2.0 * radius);

  ConditionalExpectationTable table;
  std::size_t begin = 0;
  while (begin < cells.size()) {
    std::size_t end = begin + 1;
    while (end < cells.size() && cells[end].sum - cells[end - 1].sum <= tol) ++end;
    double p = 0.0, weighted = 0.0, sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      p += cells[i].q;
      weighted += cells[i].fa * cells[i].q;
      sum += cells[i].sum;
    }
    if (p >= kZeroProbability) table.entries.push_back({sum / static_cast<double>(end - begin), p, weighted / p});
    begin = end;
  }
  return table;
}

}  // namespace epr
