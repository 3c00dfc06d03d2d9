#pragma once

#include "gadkit/matrix.hpp"

/// Brute-force reference path for certifying the decomposition engine. Nothing
/// here touches the SVD kernels: fits come from Golub-Kahan bidiagonalization
/// (LSQR) started at zero, which converges to the minimum-norm least-squares
/// solution.
namespace gadkit::oracle {

enum class GridConvention { AllRows, PredictionOnly };

/// Minimum-norm least-squares solution of `a x = y`. Stops when the relative
/// normal-equation residual ||a^H r|| / (||a||_F ||r||) drops below `tol`, when
/// the residual itself vanishes, or when the bidiagonalization breaks down
/// (Krylov space exhausted). `max_iterations = 0` picks 2 min(rows, cols) + 20.
/// Throws NotConverged with the achieved residual otherwise.
template <FieldScalar S>
Vec<S> oracle_fit(const Mat<S>& a, const Vec<S>& y, Index max_iterations = 0, double tol = 1e-12);

/// Mean of |M theta_true - M theta_hat|^2 over the chosen rows; `theta_hat`
/// may be the modeled prefix only (the rest is taken as zero).
template <FieldScalar S>
double oracle_risk(const Mat<S>& full, const RealVector& theta_true, const Vec<S>& theta_hat,
                   Index train_rows, GridConvention convention);

template <FieldScalar S>
struct OracleResult {
  Vec<S> theta_hat;  // padded to the full budget
  double risk = 0.0;
  double residual_train = 0.0;  // ||y_T - M_TM theta_hat_M||
};

/// Fits the first m columns on the training rows of `full` against labels
/// M theta_true and evaluates the risk.
template <FieldScalar S>
OracleResult<S> oracle_solve(const Mat<S>& full, Index train_rows, Index m,
                             const RealVector& theta_true, GridConvention convention);

}  // namespace gadkit::oracle
