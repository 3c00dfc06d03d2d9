#pragma once

#include <string>
#include <vector>

#include "gadkit/bases.hpp"
#include "gadkit/designs.hpp"
#include "gadkit/linalg.hpp"
#include "gadkit/matrix.hpp"

/// Block partition of the extended operator M and the aliasing decomposition
/// of prediction error built on it.
///
/// With M = [[M_TM, M_TU], [M_VM, M_VU]] (rows: training points T, then
/// prediction points V; columns: the first m modeled functions, then the
/// nescient rest), the minimum-norm fit theta_hat_M = M_TM^+ y_T satisfies
///
///   theta_hat_M = B theta_M + A theta_U,   A = M_TM^+ M_TU,   B = M_TM^+ M_TM,
///
/// so the parameter error splits into an aliasing part E_A = [[0, -A], [0, 0]]
/// and an invertibility part E_B = diag(P_K, I_U), P_K = I - B.
namespace gadkit::decomposition {

inline constexpr double kIdentityTolerance = 1e-8;

template <FieldScalar S>
struct OperatorPanel {
  Index m = 0;
  Mat<S> design;                // M_TM, n x m
  Mat<S> nescience;             // M_TU, n x (J - m)
  Mat<S> prediction_modeled;    // M_VM
  Mat<S> prediction_nescience;  // M_VU
  Index rank_tm = 0;
  double rel_tol = linalg::kDefaultRelTol;

  Index train_count() const { return design.rows(); }
  Index budget() const { return design.cols() + nescience.cols(); }
  Index unmodeled() const { return nescience.cols(); }
};

/// `full` holds training rows first; the first `m` columns are modeled.
template <FieldScalar S>
OperatorPanel<S> build_panels(const Mat<S>& full, Index train_rows, Index m,
                              double rel_tol = linalg::kDefaultRelTol);

template <FieldScalar S>
OperatorPanel<S> build_panels(const Mat<S>& full, const designs::SampleDesign& design, Index m,
                              double rel_tol = linalg::kDefaultRelTol) {
  return build_panels(full, design.train_count(), m, rel_tol);
}

/// A = M_TM^+ M_TU, shape m x (J - m).
template <FieldScalar S>
Mat<S> aliasing_operator(const OperatorPanel<S>& panel);

/// B = M_TM^+ M_TM, the projector onto the row space of M_TM.
template <FieldScalar S>
Mat<S> b_operator(const OperatorPanel<S>& panel);

/// E_A = [[0, -A], [0, 0]], J x J.
template <FieldScalar S>
Mat<S> aliasing_error_operator(const OperatorPanel<S>& panel);

/// E_B = [[I - B, 0], [0, I]], J x J.
template <FieldScalar S>
Mat<S> invertibility_operator(const OperatorPanel<S>& panel);

/// (M_TM^+ y_T, 0), padded to the full budget.
template <FieldScalar S>
Vec<S> infer_theta(const OperatorPanel<S>& panel, const Vec<S>& y_train);

struct ErrorBreakdown {
  double risk_all = 0.0;              // mean |y - y_hat|^2 over T and V rows
  double risk_prediction_only = 0.0;  // mean over V rows
  double alias_error = 0.0;           // ||A theta_U||
  double bias_error = 0.0;            // ||P_K theta_M||
  double nescience_error = 0.0;       // ||theta_U||
  double identity_residual = 0.0;     // relative gap between y_hat and M (B theta_M + A theta_U)
};

/// Labels `y_full` (= M theta, training rows first) are only used for the
/// risk; the three error terms depend on theta and the operators alone.
/// Throws DecompositionMismatch when the identity residual exceeds 1e-8.
template <FieldScalar S>
ErrorBreakdown risk_and_errors(const OperatorPanel<S>& panel, const RealVector& theta,
                               const Vec<S>& y_full);

struct RidgeConfig {
  double lambda = 0.0;
  Index n = 0;  // training size used in sqrt(n lambda); 0 means the panel's row count

  bool operator==(const RidgeConfig&) const = default;
};

template <FieldScalar S>
struct RidgeResult {
  Mat<S> augmented;                     // [M_TM; sqrt(n lambda) I_m]
  RealVector singular_values;           // of `augmented`
  RealVector expected_singular_values;  // sqrt(sigma_i^2 + n lambda), sigma padded with zeros
  double pinv_norm = 0.0;               // ||augmented^+||
};

/// Throws InvalidInput for lambda < 0 and DecompositionMismatch if the
/// augmented singular values miss sqrt(sigma^2 + n lambda) by more than 1e-9
/// relative.
template <FieldScalar S>
RidgeResult<S> ridge_panels(const OperatorPanel<S>& panel, const RidgeConfig& ridge);

/// Ridge aliasing operator augmented^+ [M_TU; 0].
template <FieldScalar S>
Mat<S> ridge_aliasing_operator(const OperatorPanel<S>& panel, const RidgeConfig& ridge);

/// Ridge E_B = [[I - augmented^+ [M_TM; 0], 0], [0, I]].
template <FieldScalar S>
Mat<S> ridge_invertibility_operator(const OperatorPanel<S>& panel, const RidgeConfig& ridge);

/// sigma^2 (dim K + dim U).
double expected_unstructured_error(double sigma2, Index dim_k, Index dim_u);

struct SweepRecord {
  Index m = 0;
  double norm_A = 0.0;
  double norm_pinv_TM = 0.0;
  double norm_M_TU = 0.0;
  double alias_error = 0.0;
  double bias_error = 0.0;
  double nescience_error = 0.0;
  double risk_all = 0.0;
  double risk_prediction_only = 0.0;
  Index rank_TM = 0;
  bool new_col_independent = false;
  double lambda = 0.0;
  double identity_residual = 0.0;
  std::string error;  // empty on success

  bool operator==(const SweepRecord&) const = default;
};

struct ModelRange {
  Index first = 1;
  Index last = 1;
  Index step = 1;

  std::vector<Index> values() const;
  bool operator==(const ModelRange&) const = default;
};

struct SweepOptions {
  ModelRange range;
  RidgeConfig ridge;
  double rel_tol = linalg::kDefaultRelTol;
  int threads = 1;
};

/// One record per m in the range. Each m is recomputed from scratch; the
/// independence flag compares the numerical rank of M_TM(m) with M_TM(m-1).
/// A failing m is recorded with `error` set and the sweep continues.
std::vector<SweepRecord> sweep_matrix(const Matrix& full, Index train_rows, const RealVector& theta,
                                      const SweepOptions& options);

std::vector<SweepRecord> sweep(const bases::BasisSpec& basis, const designs::SampleDesign& design,
                               const designs::ParameterSpec& theta_spec,
                               const SweepOptions& options);

}  // namespace gadkit::decomposition
