// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense complex matrix substrate: Kronecker products, commutators,
// Hermiticity checks, and Hermitian spectral decomposition with
// degeneracy grouping.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epr/error.hpp"

namespace epr {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Largest dimension the library is exercised on.
inline constexpr Index kMaxDim = 64;

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) {
  for (Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
  if (!all_finite(m)) throw InvalidArgument(std::string(what) + " has non-finite entries");
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionMismatch(std::string(what) + " must be a non-empty square matrix");
}

/// Default Hermiticity tolerance: 1e-10 * max(1, |M|_max).
inline double hermiticity_tolerance(const ComplexMatrix& m) {
  return 1e-10 * std::max(1.0, max_abs(m));
}

/// True iff |M - M^dagger|_max <= tol.
inline bool is_hermitian(const ComplexMatrix& m, double tol) {
  require_square(m, "is_hermitian input");
  return max_abs(m - m.adjoint()) <= tol;
}

inline bool is_hermitian(const ComplexMatrix& m) {
  return is_hermitian(m, hermiticity_tolerance(m));
}

/// Kronecker product with the first factor as the slow index:
/// entry (i1*rows(b) + i2, j1*cols(b) + j2) = a(i1,j1) * b(i2,j2).
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_finite(a, "tensor_product lhs");
  require_finite(b, "tensor_product rhs");
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// [A, B] = AB - BA.
inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "commutator lhs");
  require_square(b, "commutator rhs");
  if (a.rows() != b.rows()) throw DimensionMismatch("commutator operands differ in dimension");
  return a * b - b * a;
}

/// Solves [A, B] = i*alpha*C for C. Inputs must be Hermitian; the result is
/// Hermitian up to rounding and is symmetrized before return.
inline ComplexMatrix extract_c(const ComplexMatrix& a, const ComplexMatrix& b, double alpha) {
  if (alpha == 0.0 || !std::isfinite(alpha)) throw InvalidArgument("alpha must be finite and nonzero");
  require_square(a, "A");
  require_square(b, "B");
  if (!is_hermitian(a)) throw NotHermitian("A is not Hermitian");
  if (!is_hermitian(b)) throw NotHermitian("B is not Hermitian");
  ComplexMatrix c = commutator(a, b) / (kI * alpha);
  return (0.5 * (c + c.adjoint())).eval();
}

struct SpectralLine {
  double eigenvalue = 0.0;
  Index multiplicity = 0;
  ComplexMatrix projector;
  /// Orthonormal eigenvectors spanning the line, one per column, phase-fixed.
  ComplexMatrix basis;
};

struct SpectralDecomposition {
  std::vector<SpectralLine> lines;
  Index source_dim = 0;

  std::vector<double> eigenvalues() const {
    std::vector<double> out;
    out.reserve(lines.size());
    for (const auto& l : lines) out.push_back(l.eigenvalue);
    return out;
  }

  bool nondegenerate() const { return static_cast<Index>(lines.size()) == source_dim; }

  double spectral_radius() const {
    double r = 0.0;
    for (const auto& l : lines) r = std::max(r, std::abs(l.eigenvalue));
    return r;
  }

  /// Sum_k s_k Pi_k.
  ComplexMatrix reconstruct() const {
    ComplexMatrix h = ComplexMatrix::Zero(source_dim, source_dim);
    for (const auto& l : lines) h += l.eigenvalue * l.projector;
    return h;
  }
};

/// Default gap below which raw eigenvalues are merged into one line.
inline double default_grouping_tolerance(double spectral_radius) {
  return 1e-9 * std::max(1.0, spectral_radius);
}

/// Rotates v so that its first component with magnitude > 1e-8 is real and
/// positive.
inline void fix_phase(Eigen::Ref<ComplexVector> v) {
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > 1e-8) {
      v *= std::conj(v(i)) / mag;
      return;
    }
  }
}

/// Greedy clustering of sorted values: a new group starts whenever the gap
/// to the previous value exceeds tol. Returns [begin, end) ranges.
inline std::vector<std::pair<std::size_t, std::size_t>> cluster_sorted(const std::vector<double>& sorted,
                                                                       double tol) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || sorted[i] - sorted[i - 1] > tol) {
      groups.emplace_back(begin, i);
      begin = i;
    }
  }
  return groups;
}

/// Hermitian eigendecomposition with eigenvalues grouped into lines.
/// When grouping_tol is empty the default relative tolerance is used.
inline SpectralDecomposition spectral_decompose(const ComplexMatrix& h,
                                                std::optional<double> grouping_tol = std::nullopt) {
  require_square(h, "spectral_decompose input");
  require_finite(h, "spectral_decompose input");
  if (!is_hermitian(h)) throw NotHermitian("spectral_decompose input is not Hermitian");

  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw EigensolverFailure("Hermitian eigensolver did not converge");

  const Eigen::VectorXd& raw = solver.eigenvalues();  // ascending
  ComplexMatrix vectors = solver.eigenvectors();
  for (Index j = 0; j < vectors.cols(); ++j) fix_phase(vectors.col(j));

  std::vector<double> values(raw.data(), raw.data() + raw.size());
  const double radius = std::max(std::abs(values.front()), std::abs(values.back()));
  const double tol = grouping_tol.value_or(default_grouping_tolerance(radius));

  SpectralDecomposition out;
  out.source_dim = h.rows();
  for (const auto& [begin, end] : cluster_sorted(values, tol)) {
    SpectralLine line;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += values[i];
    line.multiplicity = static_cast<Index>(end - begin);
    line.eigenvalue = sum / static_cast<double>(line.multiplicity);
    line.basis = vectors.middleCols(static_cast<Index>(begin), line.multiplicity);
    line.projector = line.basis * line.basis.adjoint();
    out.lines.push_back(std::move(line));
  }
  return out;
}

}  // namespace epr
