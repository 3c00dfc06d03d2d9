#pragma once

#include <utility>

#include "gadkit/matrix.hpp"

/// Dense SVD-based kernels over real and complex matrices: truncated
/// pseudoinverse, spectral norm, kernel projector, and the rank-one update
/// facts used to reason about norm changes when a column is appended.
namespace gadkit::linalg {

inline constexpr double kDefaultRelTol = 1e-12;

/// Reduced SVD, X = U diag(s) V^H, with k = min(rows, cols) columns in U and V.
template <FieldScalar S>
struct SvdResult {
  Mat<S> left_vectors;
  RealVector singular_values;  // nonincreasing
  Mat<S> right_vectors;
  Index numerical_rank = 0;
  double rel_tol = kDefaultRelTol;
  double threshold = 0.0;  // rel_tol * sigma_max * max(rows, cols)

  double sigma_max() const { return singular_values.size() ? singular_values(0) : 0.0; }
  /// Smallest singular value counted in the numerical rank, 0 when rank is 0.
  double sigma_min_nonzero() const {
    return numerical_rank ? singular_values(numerical_rank - 1) : 0.0;
  }
  auto range_basis() const { return left_vectors.leftCols(numerical_rank); }
  auto row_basis() const { return right_vectors.leftCols(numerical_rank); }
};

/// Count of singular values above rel_tol * sigma_max * max(rows, cols).
Index numerical_rank(const RealVector& singular_values, Index rows, Index cols, double rel_tol);

template <FieldScalar S>
SvdResult<S> svd(const Mat<S>& x, double rel_tol = kDefaultRelTol);

/// Singular values only, nonincreasing.
template <FieldScalar S>
RealVector singular_values(const Mat<S>& x);

/// Moore-Penrose pseudoinverse with singular values below the rank threshold
/// dropped.
template <FieldScalar S>
Mat<S> pseudoinverse(const Mat<S>& x, double rel_tol = kDefaultRelTol);

template <FieldScalar S>
Mat<S> pseudoinverse(const SvdResult<S>& decomposition);

/// Largest singular value; 0 for empty or zero matrices.
template <FieldScalar S>
double spectral_norm(const Mat<S>& x);

/// Orthogonal projector onto the numerical null space of x (cols x cols).
template <FieldScalar S>
Mat<S> kernel_projector(const Mat<S>& x, double rel_tol = kDefaultRelTol);

template <FieldScalar S>
Mat<S> kernel_projector(const SvdResult<S>& decomposition, Index cols);

/// Outcome of appending one column phi to X.
struct AppendReport {
  bool was_independent = false;
  double old_min_singular = 0.0;
  double new_min_singular = 0.0;
  Index old_rank = 0;
  Index new_rank = 0;

  /// The smallest nonzero singular value may only shrink when the rank grows
  /// and may only grow when it does not. Vacuously true when old_rank is 0.
  bool satisfies_singular_bound(double rel_tol = 1e-9) const;
};

AppendReport make_append_report(Index old_rank, double old_min_singular, Index new_rank,
                                double new_min_singular);

template <FieldScalar S>
std::pair<Mat<S>, AppendReport> append_column(const Mat<S>& x, const Vec<S>& phi,
                                              double rel_tol = kDefaultRelTol);

struct InterleavingResult {
  RealVector eigs_before;  // of H, nonincreasing
  RealVector eigs_after;   // of H + c c^H, nonincreasing
  bool holds = false;
};

/// Checks after_1 >= before_1 >= after_2 >= ... >= after_n >= before_n to
/// 1e-9 * max(||H||, ||c||^2).
template <FieldScalar S>
InterleavingResult interleaving_check(const Mat<S>& h, const Vec<S>& c);

// Field-tagged entry points.
double spectral_norm(const Matrix& x);
Matrix pseudoinverse(const Matrix& x, double rel_tol = kDefaultRelTol);
Matrix kernel_projector(const Matrix& x, double rel_tol = kDefaultRelTol);

}  // namespace gadkit::linalg
