// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Two identical factors C^N (x) C^N, lifted observables, the conserved sum
// S = A (x) I + I (x) A, and projective collapse onto its eigenspaces.
//
// The product basis |a_n, a_m> is ordered lexicographically with the first
// factor as the slow index and n, m running over A's eigenvalues in
// ascending order. State amplitudes are always stored in the computational
// basis; coefficients on |a_n, a_m> are obtained through A's eigenvectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "epr/error.hpp"
#include "epr/linalg.hpp"
#include "epr/observable.hpp"
#include "epr/state.hpp"

namespace epr {

struct CompositeSpace {
  Index factor_dim = 0;
  /// (a_n(1), a_m(2)) for each product basis vector, first factor slow.
  std::vector<std::pair<double, double>> basis_labels;

  Index dim() const noexcept { return factor_dim * factor_dim; }

  /// Product space labelled by the spectrum of a nondegenerate factor
  /// observable.
  static CompositeSpace for_observable(const Observable& a) {
    if (!a.nondegenerate())
      throw InvalidArgument("factor observable has a degenerate spectrum; only nondegenerate A is supported");
    CompositeSpace space;
    space.factor_dim = a.dim();
    const std::vector<double> spec = a.eigenvalues();
    for (double an : spec)
      for (double am : spec) space.basis_labels.emplace_back(an, am);
    return space;
  }
};

enum class Slot { first = 1, second = 2 };

inline Slot slot_from_int(int slot) {
  if (slot == 1) return Slot::first;
  if (slot == 2) return Slot::second;
  throw InvalidArgument("slot must be 1 or 2");
}

/// A (x) I for the first slot, I (x) A for the second. The decomposition is
/// assembled from the factor's lines, each multiplicity scaled by N.
inline Observable lift(const Observable& obs, Slot slot, const CompositeSpace& space) {
  if (obs.dim() != space.factor_dim) throw DimensionMismatch("observable dimension differs from factor dimension");
  const Index n = space.factor_dim;
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  auto kron = [&](const ComplexMatrix& m) { return slot == Slot::first ? tensor_product(m, id) : tensor_product(id, m); };

  SpectralDecomposition spec;
  spec.source_dim = n * n;
  for (const auto& l : obs.lines()) {
    SpectralLine lifted;
    lifted.eigenvalue = l.eigenvalue;
    lifted.multiplicity = l.multiplicity * n;
    lifted.basis = kron(l.basis);
    lifted.projector = kron(l.projector);
    spec.lines.push_back(std::move(lifted));
  }
  return Observable(kron(obs.matrix()), std::move(spec), obs.grouping_tolerance());
}

struct IndexPair {
  Index n = 0;
  Index m = 0;

  bool operator==(const IndexPair&) const = default;
};

/// Anti-diagonals of the spectrum product: the pairs (n, m) grouped by the
/// value of a_n + a_m.
struct AntiDiagonalIndex {
  std::vector<double> sums;
  std::vector<std::vector<IndexPair>> sets;
  std::vector<Index> degeneracies;
  Index factor_dim = 0;

  std::size_t size() const noexcept { return sums.size(); }

  /// m with (n, m) in S(k), if any.
  std::optional<Index> partner(Index n, std::size_t k) const {
    for (const auto& p : sets.at(k))
      if (p.n == n) return p.m;
    return std::nullopt;
  }

  /// The counting function: true iff s_k - a_n is in the spectrum.
  bool chi(Index n, std::size_t k) const { return partner(n, k).has_value(); }
};

inline void require_strictly_increasing(const std::vector<double>& spectrum) {
  if (spectrum.empty()) throw InvalidArgument("spectrum is empty");
  for (std::size_t i = 1; i < spectrum.size(); ++i)
    if (!(spectrum[i] > spectrum[i - 1])) throw InvalidArgument("spectrum must be strictly increasing");
}

inline double anti_diagonal_tolerance(const std::vector<double>& first, const std::vector<double>& second) {
  double radius = 0.0;
  for (double x : first) radius = std::max(radius, std::abs(x));
  double radius2 = 0.0;
  for (double x : second) radius2 = std::max(radius2, std::abs(x));
  return default_grouping_tolerance(radius + radius2);
}

/// Groups a_n + b_m into sums s_1 < ... < s_D. Sums closer than `tol` are
/// merged into one anti-diagonal.
inline AntiDiagonalIndex anti_diagonals(const std::vector<double>& first, const std::vector<double>& second,
                                        std::optional<double> tol = std::nullopt) {
  require_strictly_increasing(first);
  require_strictly_increasing(second);
  if (first.size() != second.size()) throw DimensionMismatch("factor spectra differ in size");
  const double grouping = tol.value_or(anti_diagonal_tolerance(first, second));

  struct Entry {
    double sum;
    IndexPair pair;
  };
  std::vector<Entry> entries;
  for (std::size_t n = 0; n < first.size(); ++n)
    for (std::size_t m = 0; m < second.size(); ++m)
      entries.push_back({first[n] + second[m], {static_cast<Index>(n), static_cast<Index>(m)}});
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.sum < y.sum; });

  std::vector<double> sorted;
  sorted.reserve(entries.size());
  for (const auto& e : entries) sorted.push_back(e.sum);

  AntiDiagonalIndex idx;
  idx.factor_dim = static_cast<Index>(first.size());
  for (const auto& [begin, end] : cluster_sorted(sorted, grouping)) {
    std::vector<IndexPair> set;
    double total = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      set.push_back(entries[i].pair);
      total += entries[i].sum;
    }
    std::sort(set.begin(), set.end(), [](const IndexPair& x, const IndexPair& y) {
      return x.n != y.n ? x.n < y.n : x.m < y.m;
    });
    idx.sums.push_back(total / static_cast<double>(end - begin));
    idx.degeneracies.push_back(static_cast<Index>(end - begin));
    idx.sets.push_back(std::move(set));
  }
  return idx;
}

inline AntiDiagonalIndex anti_diagonals(const std::vector<double>& spectrum, std::optional<double> tol = std::nullopt) {
  return anti_diagonals(spectrum, spectrum, tol);
}

/// S = A1 (x) I + I (x) A2 with its eigenspaces assembled from the
/// anti-diagonals: Pi_k = sum over S(k) of P_n (x) P_m. For nondegenerate
/// factors this is sum over S(k) of |a_n, a_m><a_n, a_m|.
inline Observable sum_observable(const Observable& a1, const Observable& a2, const CompositeSpace& space) {
  if (a1.dim() != space.factor_dim || a2.dim() != space.factor_dim)
    throw DimensionMismatch("sum_observable expects factor-level observables of the space's factor dimension");
  const std::vector<double> spec1 = a1.eigenvalues();
  const std::vector<double> spec2 = a2.eigenvalues();
  const AntiDiagonalIndex idx = anti_diagonals(spec1, spec2);
  const Index n = space.factor_dim;
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);

  SpectralDecomposition spec;
  spec.source_dim = n * n;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    std::vector<ComplexMatrix> blocks;
    Index cols = 0;
    for (const auto& p : idx.sets[k]) {
      blocks.push_back(tensor_product(a1.line(static_cast<std::size_t>(p.n)).basis,
                                      a2.line(static_cast<std::size_t>(p.m)).basis));
      cols += blocks.back().cols();
    }
    SpectralLine line;
    line.eigenvalue = idx.sums[k];
    line.multiplicity = cols;
    line.basis.resize(n * n, cols);
    Index col = 0;
    for (const auto& b : blocks) {
      line.basis.middleCols(col, b.cols()) = b;
      col += b.cols();
    }
    line.projector = line.basis * line.basis.adjoint();
    spec.lines.push_back(std::move(line));
  }
  ComplexMatrix s = tensor_product(a1.matrix(), id) + tensor_product(id, a2.matrix());
  return Observable(std::move(s), std::move(spec), anti_diagonal_tolerance(spec1, spec2));
}

inline Observable sum_observable(const Observable& a, const CompositeSpace& space) {
  return sum_observable(a, a, space);
}

/// Pi_k of the sum observable.
inline const ComplexMatrix& eigenspace_projector(const Observable& s, std::size_t k) {
  if (k >= s.lines().size()) throw InvalidArgument("eigenspace index out of range");
  return s.lines()[k].projector;
}

/// Coefficients <a_n, a_m|psi> as an N x N matrix.
inline ComplexMatrix product_coefficients(const PureState& state, const Observable& a) {
  const Index n = a.dim();
  if (state.dim() != n * n) throw DimensionMismatch("state is not on the product of two factors of A's dimension");
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> psi(state.amplitudes().data(), n, n);
  const ComplexMatrix v = a.eigenbasis();
  return v.adjoint() * psi * v.conjugate();
}

struct JointDistribution {
  /// q(n, m) = |<a_n(1), a_m(2)|psi>|^2.
  Eigen::MatrixXd q;

  double total() const { return q.sum(); }
};

inline JointDistribution joint_distribution(const PureState& state, const Observable& a, const CompositeSpace& space) {
  if (a.dim() != space.factor_dim) throw DimensionMismatch("observable dimension differs from factor dimension");
  if (!a.nondegenerate()) throw InvalidArgument("joint_distribution requires a nondegenerate factor observable");
  return JointDistribution{product_coefficients(state, a).cwiseAbs2()};
}

/// p(s_k) as the sum of q over the anti-diagonal S(k).
inline OutcomeDistribution sum_probabilities(const JointDistribution& q, const AntiDiagonalIndex& idx) {
  if (q.q.rows() != idx.factor_dim || q.q.cols() != idx.factor_dim)
    throw DimensionMismatch("joint distribution and anti-diagonal index disagree on dimension");
  OutcomeDistribution dist;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    double p = 0.0;
    for (const auto& pair : idx.sets[k]) p += q.q(pair.n, pair.m);
    dist.outcomes.push_back({idx.sums[k], p});
  }
  return dist;
}

struct Collapse {
  PureState state;
  double probability = 0.0;
};

/// (Pi psi / sqrt(p), p) with p = <psi|Pi|psi>. Throws ImpossibleOutcome when
/// p < 1e-12.
inline Collapse post_measurement_state(const PureState& state, const ComplexMatrix& projector) {
  if (projector.rows() != state.dim() || projector.cols() != state.dim())
    throw DimensionMismatch("projector and state dimensions differ");
  if (!is_hermitian(projector, 1e-8) || max_abs(projector * projector - projector) > 1e-8)
    throw InvalidArgument("post_measurement_state needs a Hermitian idempotent projector");
  ComplexVector projected = projector * state.amplitudes();
  const double p = state.amplitudes().dot(projected).real();
  if (p < kZeroProbability) throw ImpossibleOutcome("conditioning on an outcome of probability below 1e-12");
  return Collapse{PureState(std::move(projected), state.factor_dims()), std::min(p, 1.0)};
}

struct SumBranch {
  double eigenvalue = 0.0;
  double probability = 0.0;
  /// sqrt(p(s_k)), equal to |Pi_k psi|.
  double weight = 0.0;
  PureState state;
};

/// psi = sum_k sqrt(p(s_k)) psi_{s_k}. Branches with p below the zero
/// threshold are omitted; branch phases are inherited from Pi_k psi.
inline std::vector<SumBranch> decompose_by_sum(const PureState& state, const Observable& s) {
  require_same_dim(state, s);
  std::vector<SumBranch> branches;
  for (const auto& l : s.lines()) {
    ComplexVector projected = l.projector * state.amplitudes();
    const double weight = projected.norm();
    if (weight * weight < kZeroProbability) continue;
    branches.push_back({l.eigenvalue, weight * weight, weight, PureState(std::move(projected), state.factor_dims())});
  }
  return branches;
}

/// Number of singular values of the N x N coefficient matrix above tol.
inline Index schmidt_rank(const PureState& state, const CompositeSpace& space, double tol = 1e-10) {
  const Index n = space.factor_dim;
  if (state.dim() != n * n) throw DimensionMismatch("state is not on the composite space");
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const ComplexMatrix psi = Eigen::Map<const RowMajor>(state.amplitudes().data(), n, n);
  const Eigen::JacobiSVD<ComplexMatrix> svd(psi);
  const Eigen::VectorXd& sv = svd.singularValues();
  return static_cast<Index>((sv.array() > tol).count());
}

/// The composite system built from one nondegenerate factor observable A:
/// the lifted A1, A2, the sum S, and the anti-diagonal index whose order
/// matches S's spectral lines.
class EprSystem {
 public:
  explicit EprSystem(Observable a)
      : factor_(std::move(a)),
        space_(CompositeSpace::for_observable(factor_)),
        a1_(lift(factor_, Slot::first, space_)),
        a2_(lift(factor_, Slot::second, space_)),
        sum_(sum_observable(factor_, space_)),
        index_(anti_diagonals(factor_.eigenvalues())) {}

  const Observable& factor() const noexcept { return factor_; }
  const CompositeSpace& space() const noexcept { return space_; }
  const Observable& a1() const noexcept { return a1_; }
  const Observable& a2() const noexcept { return a2_; }
  const Observable& sum() const noexcept { return sum_; }
  const AntiDiagonalIndex& index() const noexcept { return index_; }
  Index factor_dim() const noexcept { return space_.factor_dim; }

  std::size_t sum_line(double s_value) const { return sum_.match_line(s_value); }
  std::size_t factor_line(double a_value) const { return factor_.match_line(a_value); }

  /// |a_n> (x) |a_m> in computational coordinates.
  PureState basis_state(Index n, Index m) const {
    return PureState(tensor_product(factor_.eigenvector(static_cast<std::size_t>(n)),
                                    factor_.eigenvector(static_cast<std::size_t>(m))),
                     {factor_dim(), factor_dim()});
  }

  Observable lift_first(const Observable& obs) const { return lift(obs, Slot::first, space_); }
  Observable lift_second(const Observable& obs) const { return lift(obs, Slot::second, space_); }

  void require_composite(const PureState& state) const {
    if (state.dim() != space_.dim()) throw DimensionMismatch("state is not on the composite space");
  }

 private:
  Observable factor_;
  CompositeSpace space_;
  Observable a1_;
  Observable a2_;
  Observable sum_;
  AntiDiagonalIndex index_;
};

}  // namespace epr
