// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "epr/error.hpp"
#include "epr/linalg.hpp"

namespace epr {

/// A Hermitian matrix together with its cached spectral decomposition.
class Observable {
 public:
  explicit Observable(ComplexMatrix matrix, std::optional<double> grouping_tol = std::nullopt)
      : matrix_(std::move(matrix)), spectrum_(spectral_decompose(matrix_, grouping_tol)) {
    grouping_tol_ = grouping_tol.value_or(default_grouping_tolerance(spectrum_.spectral_radius()));
  }

  /// Assembles an observable whose decomposition is already known
  /// structurally (Kronecker lifts, anti-diagonal sums).
  Observable(ComplexMatrix matrix, SpectralDecomposition spectrum, double grouping_tol)
      : matrix_(std::move(matrix)), spectrum_(std::move(spectrum)), grouping_tol_(grouping_tol) {
    require_square(matrix_, "observable");
    Index total = 0;
    for (const auto& l : spectrum_.lines) total += l.multiplicity;
    if (total != matrix_.rows() || spectrum_.source_dim != matrix_.rows())
      throw DimensionMismatch("spectral multiplicities do not cover the observable dimension");
  }

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const SpectralDecomposition& spectrum() const noexcept { return spectrum_; }
  const std::vector<SpectralLine>& lines() const noexcept { return spectrum_.lines; }
  const SpectralLine& line(std::size_t k) const {
    if (k >= spectrum_.lines.size()) throw InvalidArgument("spectral line index out of range");
    return spectrum_.lines[k];
  }
  Index dim() const noexcept { return matrix_.rows(); }
  double grouping_tolerance() const noexcept { return grouping_tol_; }
  std::vector<double> eigenvalues() const { return spectrum_.eigenvalues(); }
  bool nondegenerate() const noexcept { return spectrum_.nondegenerate(); }

  /// Index of the line whose eigenvalue lies within the grouping tolerance
  /// of `value`.
  std::optional<std::size_t> find_line(double value) const {
    for (std::size_t k = 0; k < spectrum_.lines.size(); ++k)
      if (std::abs(spectrum_.lines[k].eigenvalue - value) <= grouping_tol_) return k;
    return std::nullopt;
  }

  std::size_t match_line(double value) const {
    if (auto k = find_line(value)) return *k;
    std::ostringstream msg;
    msg << "value " << value << " is not in the spectrum";
    throw InvalidArgument(msg.str());
  }

  /// Unit eigenvector for eigenvalue index n of a nondegenerate observable.
  ComplexVector eigenvector(std::size_t n) const {
    const SpectralLine& l = line(n);
    if (l.multiplicity != 1) throw InvalidArgument("eigenvector requested for a degenerate line");
    return l.basis.col(0);
  }

  /// Columns are the eigenvectors ordered by ascending eigenvalue.
  ComplexMatrix eigenbasis() const {
    ComplexMatrix v(dim(), dim());
    Index col = 0;
    for (const auto& l : spectrum_.lines) {
      v.middleCols(col, l.multiplicity) = l.basis;
      col += l.multiplicity;
    }
    return v;
  }

 private:
  ComplexMatrix matrix_;
  SpectralDecomposition spectrum_;
  double grouping_tol_ = 0.0;
};

/// A real-valued function given as a table over a finite set of spectral
/// points. Lookups match within a tolerance because callers pass computed
/// eigenvalues.
class SpectrumFunction {
 public:
  SpectrumFunction() = default;

  explicit SpectrumFunction(std::vector<std::pair<double, double>> table) : table_(std::move(table)) {
    std::sort(table_.begin(), table_.end());
  }

  template <typename F>
  static SpectrumFunction tabulate(const std::vector<double>& points, F&& fn) {
    std::vector<std::pair<double, double>> table;
    table.reserve(points.size());
    for (double x : points) table.emplace_back(x, static_cast<double>(fn(x)));
    return SpectrumFunction(std::move(table));
  }

  static SpectrumFunction identity(const std::vector<double>& points) {
    return tabulate(points, [](double x) { return x; });
  }

  static SpectrumFunction constant(const std::vector<double>& points, double c) {
    return tabulate(points, [c](double) { return c; });
  }

  std::optional<double> find(double x, double tol) const {
    for (const auto& [key, value] : table_)
      if (std::abs(key - x) <= tol) return value;
    return std::nullopt;
  }

  double at(double x, double tol) const {
    if (auto v = find(x, tol)) return *v;
    std::ostringstream msg;
    msg << "function table has no entry for " << x;
    throw InvalidArgument(msg.str());
  }

  bool covers(const std::vector<double>& points, double tol) const {
    return std::all_of(points.begin(), points.end(), [&](double x) { return find(x, tol).has_value(); });
  }

  const std::vector<std::pair<double, double>>& table() const noexcept { return table_; }

 private:
  std::vector<std::pair<double, double>> table_;
};

/// f(A) = sum_n f(a_n) Pi_n.
inline ComplexMatrix operator_function(const Observable& obs, const SpectrumFunction& f) {
  ComplexMatrix out = ComplexMatrix::Zero(obs.dim(), obs.dim());
  for (const auto& l : obs.lines()) out += f.at(l.eigenvalue, obs.grouping_tolerance()) * l.projector;
  return out;
}

struct Outcome {
  double value = 0.0;
  double probability = 0.0;

  bool operator==(const Outcome&) const = default;
};

/// Probabilities over an observable's distinct eigenvalues.
struct OutcomeDistribution {
  std::vector<Outcome> outcomes;

  double total() const {
    double s = 0.0;
    for (const auto& o : outcomes) s += o.probability;
    return s;
  }

  std::optional<double> probability_of(double value, double tol) const {
    for (const auto& o : outcomes)
      if (std::abs(o.value - value) <= tol) return o.probability;
    return std::nullopt;
  }

  bool operator==(const OutcomeDistribution&) const = default;
};

}  // namespace epr
