// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Pure states, outcome probabilities, best predictors and prediction
// errors, and the uncertainty-relation audit.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "epr/error.hpp"
#include "epr/linalg.hpp"
#include "epr/observable.hpp"

namespace epr {

/// Norm below which a vector cannot be turned into a state.
inline constexpr double kMinStateNorm = 1e-8;

/// Outcomes with probability below this are treated as impossible.
inline constexpr double kZeroProbability = 1e-12;

/// Unit vector on a space with the given factor structure. The constructor
/// normalizes its input and records the scale that was applied.
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes, std::vector<Index> factor_dims = {})
      : amplitudes_(std::move(amplitudes)), factor_dims_(std::move(factor_dims)) {
    if (amplitudes_.size() == 0) throw InvalidArgument("state vector is empty");
    require_finite(amplitudes_, "state vector");
    if (factor_dims_.empty()) factor_dims_ = {amplitudes_.size()};
    const Index product = std::accumulate(factor_dims_.begin(), factor_dims_.end(), Index{1}, std::multiplies<>());
    if (product != amplitudes_.size()) throw DimensionMismatch("factor dims do not multiply to the state dimension");
    const double norm = amplitudes_.norm();
    if (norm < kMinStateNorm) throw InvalidArgument("state vector norm is below 1e-8");
    scale_ = 1.0 / norm;
    amplitudes_ *= scale_;
  }

  static PureState composite(ComplexVector amplitudes, Index factor_dim) {
    return PureState(std::move(amplitudes), {factor_dim, factor_dim});
  }

  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  Index dim() const noexcept { return amplitudes_.size(); }
  const std::vector<Index>& factor_dims() const noexcept { return factor_dims_; }
  double applied_scale() const noexcept { return scale_; }

  /// <psi|M|psi>
  Complex expectation(const ComplexMatrix& m) const {
    if (m.rows() != dim() || m.cols() != dim()) throw DimensionMismatch("operator and state dimensions differ");
    return amplitudes_.dot(m * amplitudes_);
  }

 private:
  ComplexVector amplitudes_;
  std::vector<Index> factor_dims_;
  double scale_ = 1.0;
};

inline double fidelity(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("states differ in dimension");
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

/// Equality up to global phase: |<a|b>| >= 1 - tol.
inline bool same_up_to_phase(const PureState& a, const PureState& b, double tol = 1e-10) {
  return fidelity(a, b) >= 1.0 - tol;
}

inline void require_same_dim(const PureState& state, const Observable& obs) {
  if (state.dim() != obs.dim()) throw DimensionMismatch("state and observable dimensions differ");
}

/// p(s_k) = <psi|Pi_k|psi> for each distinct eigenvalue.
inline OutcomeDistribution outcome_probabilities(const PureState& state, const Observable& obs) {
  require_same_dim(state, obs);
  OutcomeDistribution dist;
  for (const auto& l : obs.lines()) {
    // Pi = V V^dagger, so <psi|Pi|psi> = |V^dagger psi|^2, which is exactly nonnegative.
    const double p = (l.basis.adjoint() * state.amplitudes()).squaredNorm();
    dist.outcomes.push_back({l.eigenvalue, std::clamp(p, 0.0, 1.0)});
  }
  return dist;
}

/// Sum_n f(a_n) p(a_n).
inline double best_predictor(const PureState& state, const Observable& obs, const SpectrumFunction& f) {
  const OutcomeDistribution dist = outcome_probabilities(state, obs);
  double total = 0.0;
  for (const auto& o : dist.outcomes) total += f.at(o.value, obs.grouping_tolerance()) * o.probability;
  return total;
}

/// <psi|f(A)|psi>, the matrix route to the same number.
inline double best_predictor_quadratic_form(const PureState& state, const Observable& obs,
                                            const SpectrumFunction& f) {
  require_same_dim(state, obs);
  return state.expectation(operator_function(obs, f)).real();
}

inline double mean_value(const PureState& state, const Observable& obs) {
  return best_predictor(state, obs, SpectrumFunction::identity(obs.eigenvalues()));
}

/// Delta(A) = |(A - m) psi| with m the best predictor of A.
inline double prediction_error(const PureState& state, const Observable& obs) {
  const double m = mean_value(state, obs);
  const ComplexVector shifted = obs.matrix() * state.amplitudes() - m * state.amplitudes();
  return shifted.norm();
}

struct UncertaintyReport {
  double delta_a = 0.0;
  double delta_b = 0.0;
  double rhs = 0.0;
  bool satisfied = true;

  bool operator==(const UncertaintyReport&) const = default;
};

inline constexpr double kUncertaintySlack = 1e-10;

/// Checks Delta(A) Delta(B) >= |alpha|/2 |<C>| for [A,B] = i alpha C.
/// With alpha = 1 the bound is the familiar 1/2 |<C>|.
inline UncertaintyReport audit_uncertainty(const PureState& state, const Observable& a, const Observable& b,
                                           const Observable& c, double alpha = 1.0) {
  require_same_dim(state, a);
  require_same_dim(state, b);
  require_same_dim(state, c);
  UncertaintyReport r;
  r.delta_a = prediction_error(state, a);
  r.delta_b = prediction_error(state, b);
  r.rhs = 0.5 * std::abs(alpha) * std::abs(state.expectation(c.matrix()));
  r.satisfied = r.delta_a * r.delta_b >= r.rhs - kUncertaintySlack;
  return r;
}

struct Theorem1Report {
  double trace_residual = 0.0;
  double max_diag_residual = 0.0;
  /// Frobenius norm of C.
  double c_norm = 0.0;
  /// A had repeated eigenvalues; the diagonal residual then depends on the
  /// eigenbasis chosen inside each degenerate line.
  bool degenerate = false;

  bool holds(double rel_tol = 1e-10) const {
    return trace_residual <= rel_tol * c_norm && max_diag_residual <= rel_tol * c_norm;
  }
};

/// With C = [A,B]/(i alpha): |tr C| and the largest |<phi_a|C|phi_a>| over
/// A's eigenvectors.
inline Theorem1Report verify_theorem1(const Observable& a, const Observable& b, double alpha) {
  if (a.dim() != b.dim()) throw DimensionMismatch("A and B differ in dimension");
  const ComplexMatrix c = extract_c(a.matrix(), b.matrix(), alpha);
  Theorem1Report r;
  r.c_norm = c.norm();
  r.trace_residual = std::abs(c.trace());
  r.degenerate = !a.nondegenerate();
  const ComplexMatrix v = a.eigenbasis();
  for (Index j = 0; j < v.cols(); ++j)
    r.max_diag_residual = std::max(r.max_diag_residual, std::abs(v.col(j).dot(c * v.col(j))));
  return r;
}

}  // namespace epr
